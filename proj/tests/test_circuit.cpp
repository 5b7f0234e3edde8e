#include <doctest.h>

#include <map>

#include "motiq/circuit.hpp"
#include "support.hpp"

using namespace motiq;

namespace {

Eigen::VectorXd random_params(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0, 2 * M_PI);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = d(rng);
  return p;
}

StateVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0, 1);
  StateVector psi(1LL << n);
  for (long long i = 0; i < psi.size(); ++i) psi[i] = Complex(d(rng), d(rng));
  psi.normalize();
  return psi;
}

/// A random small architecture restricted to shift-rule mappings.
Motif random_program_motif(int qubits, std::mt19937_64& rng) {
  static const std::vector<std::string> convs = {"u_ttn", "u_9",  "u_15", "u_so4",
                                                 "u_13",  "u_14", "u_5",  "u_6"};
  static const std::vector<std::string> pools = {"v_pool", "v_cx", "v_crz",
                                                 "v_crx", "v_rzrx"};
  Motif m = qfree(qubits);
  const int layers = 1 + static_cast<int>(rng() % 3);
  int width = qubits;
  for (int l = 0; l < layers; ++l) {
    Hyperparams h;
    h.stride = 1 + static_cast<int>(rng() % std::max(1, width - 1));
    h.mapping = convs[rng() % convs.size()];
    m = m + qconv(h);
    if (width >= 2 && rng() % 2) {
      Hyperparams p;
      p.stride = static_cast<int>(rng() % 3);
      p.filter = FilterSpec{"right"};
      p.mapping = pools[rng() % pools.size()];
      m = m + qpool(p);
      width = (width + 1) / 2;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("the stock registry pins the documented parameter counts") {
  Registry r = Registry::defaults();
  const std::map<std::string, int> expected = {
      {"u_ttn", 2}, {"u_9", 2},   {"u_15", 4},  {"u_so4", 6}, {"u_13", 6},
      {"u_14", 6},  {"u_5", 10},  {"u_6", 10},  {"v_pool", 0}, {"v_cx", 0},
      {"v_crz", 1}, {"v_crx", 1}, {"v_rzrx", 2}, {"u_gm1", 3}, {"u_gm2", 15},
      {"u_gm3", 63}, {"u_gm4", 255}};
  for (const auto& [name, count] : expected) {
    CAPTURE(name);
    CHECK(r.at(name).param_count == count);
  }
  CHECK_THROWS_AS(r.at("nonsense"), ConfigError);
}

TEST_CASE("every registered generator is unitary at random parameters") {
  Registry r = Registry::defaults();
  std::mt19937_64 rng(3);
  for (const auto& name : r.names()) {
    const UnitaryMapping& m = r.at(name);
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::MatrixXcd u = mapping_unitary(m, random_params(m.param_count, rng));
      const int dim = 1 << m.arity;
      const double err =
          (u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).norm();
      CAPTURE(name);
      CHECK(err < 1e-10);
    }
  }
}

TEST_CASE("compiled trees reproduce the published parameter totals") {
  Registry r = Registry::defaults();
  const std::map<std::string, int> table = {{"u_ttn", 6}, {"u_9", 6},
                                            {"u_15", 12}, {"u_so4", 18},
                                            {"u_13", 18}, {"u_14", 18},
                                            {"u_5", 30},  {"u_6", 30}};
  for (const auto& [ansatz, total] : table) {
    Motif tree = reverse_binary_tree(8, 1, 0, FilterSpec{"right"}, ansatz);
    CircuitProgram prog = compile(resolve(tree), r);
    CAPTURE(ansatz);
    CHECK(prog.param_count() == total);
    CHECK(prog.model_unitary_count() == 22);
    CHECK(prog.counts.convolution == 13);
    CHECK(prog.readout == 0);
  }
}

TEST_CASE("a one-qubit layer compiles to the single-qubit reduction") {
  Registry r = Registry::defaults();
  CircuitProgram prog = compile(resolve(qfree(1) + qconv(1)), r);
  REQUIRE(prog.sites.size() == 1);
  CHECK(prog.sites[0].kind == SiteKind::Rotation);
  CHECK(prog.param_count() == 2);  // the shared set keeps the full width
  StateVector out = run(prog, Eigen::VectorXd::Constant(2, M_PI), zero_state(1));
  CHECK(readout_probability(out, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compile rejects bad mappings") {
  Registry r = Registry::defaults();
  Hyperparams h;
  h.stride = 1;
  h.mapping = "unknown_thing";
  CHECK_THROWS_AS(compile(resolve(qfree(4) + qconv(h)), r), ConfigError);
  h.mapping = "u_gm3";  // arity three against two-qubit edges
  CHECK_THROWS_AS(compile(resolve(qfree(4) + qconv(h)), r), ConfigError);
}

TEST_CASE("running an empty program is the identity") {
  Registry r = Registry::defaults();
  CircuitProgram prog = compile(resolve(qfree(2)), r);
  std::mt19937_64 rng(5);
  StateVector psi = random_state(2, rng);
  StateVector out = run(prog, Eigen::VectorXd(0), psi);
  CHECK((out - psi).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("a CNOT layer acts on the computational basis") {
  Registry r = Registry::defaults();
  Hyperparams h;
  h.mapping = "v_cx";
  CircuitProgram prog = compile(resolve(qfree(2) + qconv(h)), r);
  Eigen::VectorXd none(0);

  StateVector out = run(prog, none, zero_state(2));
  CHECK(std::abs(out[0] - Complex(1, 0)) < 1e-12);

  StateVector one = StateVector::Zero(4);
  one[1] = 1.0;  // first qubit set
  out = run(prog, none, one);
  CHECK(std::abs(out[3] - Complex(1, 0)) < 1e-12);
}

TEST_CASE("the simulator matches the dense matrix-product oracle") {
  Registry r = Registry::defaults();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Motif m = random_program_motif(n, rng);
    CircuitProgram prog = compile(resolve(m), r);
    Eigen::VectorXd params = random_params(prog.param_count(), rng);
    StateVector input = random_state(n, rng);
    StateVector fast = run(prog, params, input);
    StateVector slow = test::program_matrix(prog, params) * input;
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("readout and expectation values") {
  StateVector one = StateVector::Zero(2);
  one[1] = 1.0;
  CHECK(readout_probability(one, 0) == doctest::Approx(1.0));
  CHECK(expectation_z(one, 0) == doctest::Approx(-1.0));

  StateVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(readout_probability(plus, 0) == doctest::Approx(0.5));
  CHECK(expectation_z(plus, 0) == doctest::Approx(0.0).epsilon(1e-12));

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    StateVector psi = random_state(3, rng);
    for (int q = 0; q < 3; ++q) {
      double p1 = readout_probability(psi, q);
      double p0 = 0;
      for (long long i = 0; i < psi.size(); ++i)
        if (!(i & (1LL << q))) p0 += std::norm(psi[i]);
      CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(expectation_z(psi, q) ==
            doctest::Approx(1.0 - 2.0 * p1).epsilon(1e-12));
    }
  }
}

TEST_CASE("encodings") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
  e1[0] = 1.0;
  StateVector amp = encode(e1, Encoding::Amplitude, 2);
  CHECK(std::abs(amp[0] - Complex(1, 0)) < 1e-15);

  StateVector q0 = encode(Eigen::VectorXd::Zero(3), Encoding::Qubit, 3);
  CHECK(std::abs(q0[0] - Complex(1, 0)) < 1e-15);

  std::mt19937_64 rng(29);
  Eigen::VectorXd img(256);
  for (int i = 0; i < 256; ++i)
    img[i] = std::uniform_real_distribution<double>(0, 1)(rng);
  CHECK(encode(img, Encoding::Amplitude, 8).norm() == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd feats(4);
  feats << 0.3, 1.1, 2.0, 0.7;
  StateVector iqp = encode(feats, Encoding::Iqp, 4);
  CHECK(iqp.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((iqp - encode(feats, Encoding::Iqp, 4)).norm() == 0.0);

  CHECK_THROWS_AS(encode(Eigen::VectorXd::Zero(4), Encoding::Amplitude, 2),
                  ConfigError);
  CHECK_THROWS_AS(encode(Eigen::VectorXd::Ones(5), Encoding::Amplitude, 2),
                  ConfigError);
  CHECK_THROWS_AS(encode(Eigen::VectorXd::Ones(3), Encoding::Qubit, 2), ConfigError);
}

TEST_CASE("norm preservation over random programs") {
  Registry r = Registry::defaults();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);
    Motif m = random_program_motif(n, rng);
    CircuitProgram prog = compile(resolve(m), r);
    StateVector out = run(prog, random_params(prog.param_count(), rng),
                          random_state(n, rng));
    CHECK(std::abs(out.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("weight sharing binds every edge of a layer to one group") {
  Registry r = Registry::defaults();
  Motif tree = reverse_binary_tree(8, 1, 0, FilterSpec{"right"});
  CircuitProgram shared = compile(resolve(tree), r);
  CHECK(shared.groups.size() == 6);  // three convolution + three pooling layers

  CompileOptions opts;
  opts.share_weights = false;
  CircuitProgram unshared = compile(resolve(tree), r, opts);
  CHECK(unshared.param_count() == (8 + 4 + 1) * 2);

  // identical compilations stay identical site by site
  CircuitProgram again = compile(resolve(tree), r);
  REQUIRE(again.sites.size() == shared.sites.size());
  for (size_t i = 0; i < again.sites.size(); ++i) {
    CHECK(again.sites[i].group == shared.sites[i].group);
    CHECK(again.sites[i].local == shared.sites[i].local);
  }
}

TEST_CASE("controlled pooling matches measure-and-feed-forward statistics") {
  Registry r = Registry::defaults();
  Hyperparams pool;
  pool.stride = 0;
  pool.filter = FilterSpec{"right"};
  pool.mapping = "v_cx";
  Motif m = qfree(3) + qconv(1) + qpool(pool);
  CircuitProgram prog = compile(resolve(m), r);
  auto graphs = resolve(m);
  const auto& pg = graphs.back();
  REQUIRE(pg.edges.size() == 1);
  const int control = pg.edges[0][0], target = pg.edges[0][1];

  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd params = random_params(prog.param_count(), rng);
    StateVector input = random_state(3, rng);
    StateVector with_cu = run(prog, params, input);

    // oracle: run everything but the pooling gate, project the control,
    // apply X classically, and average the kept-qubit marginals
    CircuitProgram head = prog;
    head.sites.pop_back();
    StateVector pre = run(head, params, input);
    const long long cbit = 1LL << control;
    StateVector p0 = pre, p1 = pre;
    for (long long i = 0; i < pre.size(); ++i) {
      if (i & cbit)
        p0[i] = 0;
      else
        p1[i] = 0;
    }
    // branch 1 applies X on the target
    StateVector p1x = p1;
    const long long tbit = 1LL << target;
    for (long long i = 0; i < pre.size(); ++i)
      if (i & cbit) p1x[i ^ tbit] = p1[i];

    for (int kq = 0; kq < 3; ++kq) {
      if (kq == control) continue;
      const double expected =
          readout_probability(p0, kq) + readout_probability(p1x, kq);
      CHECK(std::abs(readout_probability(with_cu, kq) - expected) < 1e-9);
    }
  }
}

TEST_CASE("qasm export lists opaque ansatz calls") {
  Registry r = Registry::defaults();
  Motif tree = reverse_binary_tree(4, 1, 0, FilterSpec{"right"});
  CircuitProgram prog = compile(resolve(tree), r);
  const std::string qasm = to_qasm(prog, Eigen::VectorXd::Zero(prog.param_count()));
  CHECK(qasm.rfind("OPENQASM 2.0;", 0) == 0);
  CHECK(qasm.find("opaque u_ttn_2(p0,p1) a0,a1;") != std::string::npos);
  CHECK(qasm.find("qreg q[4];") != std::string::npos);
  CHECK(qasm.find("measure q[0] -> c[0];") != std::string::npos);
  size_t calls = 0, pos = 0;
  while ((pos = qasm.find("\nu_ttn_2(", pos)) != std::string::npos) {
    ++calls;
    pos += 1;
  }
  CHECK(calls == 5);  // 4 + 1 convolution edges
}

TEST_CASE("statevector csv") {
  const std::string csv = state_to_csv(zero_state(2));
  CHECK(csv.rfind("index,re,im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("gellmann basis spans hermitian traceless matrices") {
  for (int dim : {2, 3, 4, 8}) {
    auto basis = gellmann_basis(dim);
    CHECK(basis.size() == static_cast<size_t>(dim * dim - 1));
    for (const auto& g : basis) {
      CHECK((g - g.adjoint()).norm() < 1e-15);
      CHECK(std::abs(g.trace()) < 1e-12);
    }
  }
}

TEST_CASE("motifs can be registered as reusable unitaries") {
  Registry r = Registry::defaults();
  r.add_motif_mapping("m_block", qfree(2) + qdense());
  const UnitaryMapping& m = r.at("m_block");
  CHECK(m.arity == 2);
  CHECK(m.param_count == 2);  // one shared dense layer of u_ttn
  std::mt19937_64 rng(41);
  Eigen::MatrixXcd u = mapping_unitary(m, random_params(2, rng));
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-10);

  Hyperparams h;
  h.stride = 1;
  h.mapping = "m_block";
  CircuitProgram prog = compile(resolve(qfree(4) + qconv(h)), r);
  CHECK(prog.param_count() == 2);
  StateVector out = run(prog, random_params(2, rng), zero_state(4));
  CHECK(std::abs(out.norm() - 1.0) < 1e-10);
}

TEST_CASE("the full original-architecture construction compiles and runs") {
  Registry r = Registry::defaults();
  const int n = 3, qubits = 9;
  Hyperparams dense;
  dense.mapping = "u_gm2";
  r.add_motif_mapping("m_head", qfree(n + 1) + qdense(dense));
  CHECK(resolve(qfree(n + 1) + qdense(dense))[1].edges.size() == 12);

  Hyperparams m2;
  m2.stride = 1;
  m2.step = n;
  m2.offset = n - 1;
  m2.qpu = n + 1;
  m2.mapping = "m_head";
  Motif motif = qfree(qubits) + qconv(m2);
  for (int i = 0; i < n; ++i) {
    Hyperparams m3;
    m3.stride = 1;
    m3.step = n;
    m3.offset = i;
    m3.qpu = n;
    m3.mapping = "u_gm3";
    motif = motif + qconv(m3);
  }
  Hyperparams m4;
  m4.stride = 1;
  m4.step = n;
  m4.offset = 0;
  m4.qpu = n;
  m4.filter = FilterSpec{"101"};
  m4.mapping = "u_gm1";
  motif = motif + qpool(m4);
  Hyperparams m5;
  m5.stride = 1;
  m5.step = n;
  m5.qpu = n;
  m5.mapping = "u_gm3";
  motif = motif + qconv(m5);

  auto graphs = resolve(motif);
  const auto counts = count_unitaries(graphs);
  CHECK(counts.convolution == 3 + 3 * n + 1);
  CHECK(counts.pooling == 3);

  CircuitProgram prog = compile(graphs, r);
  CHECK(prog.param_count() == 15 + 3 * 63 + 3 + 63);
  CHECK_FALSE(prog.shift_rule_applies());

  std::mt19937_64 rng(43);
  StateVector out = run(prog, random_params(prog.param_count(), rng),
                        zero_state(qubits));
  CHECK(std::abs(out.norm() - 1.0) < 1e-9);
}

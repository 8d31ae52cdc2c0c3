#include <doctest.h>

#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/evalx.hpp"
#include "moledit/lineio.hpp"

using namespace moledit;

TEST_CASE("builtin oracles compute the standard descriptors") {
  OracleRegistry reg = OracleRegistry::builtin();
  CHECK(reg.value("mol_weight", parse_smiles("C")) ==
        doctest::Approx(16.043).epsilon(1e-6));
  CHECK(reg.value("heavy_atoms", parse_smiles("CCO")) == 3.0);
  CHECK(reg.value("ring_count", parse_smiles("c1ccccc1")) == 1.0);
  CHECK(reg.value("hbd", parse_smiles("O")) == 1.0);
  CHECK(reg.value("hba", parse_smiles("CC(N)=O")) == 2.0);

  CHECK(reg.has("mol_weight"));
  CHECK_FALSE(reg.has("logp"));
  CHECK_THROWS_AS(reg.value("logp", parse_smiles("C")), UnknownOracle);
}

TEST_CASE("external oracles run a command and read one number") {
  OracleRegistry reg;
  // The command receives the SMILES as its last argument; the trailing '#'
  // comments it away so the output is just the number.
  reg.add_external("fixed", "echo 42 #");
  CHECK(reg.value("fixed", parse_smiles("CCO")) == 42.0);

  reg.add_external("silent", "true");
  CHECK_THROWS_AS(reg.value("silent", parse_smiles("C")), UnknownOracle);
  reg.add_external("failing", "false");
  CHECK_THROWS_AS(reg.value("failing", parse_smiles("C")), UnknownOracle);
}

TEST_CASE("evaluate rejects empty input and unknown goals") {
  OracleRegistry reg = OracleRegistry::builtin();
  CHECK_THROWS_AS(evaluate({}, std::nullopt, reg, 0), EmptyInput);

  std::vector<EvalRecord> one(1);
  one[0].source = "CCO";
  Goal goal;
  goal.oracle = "logp";
  CHECK_THROWS_AS(evaluate(one, goal, reg, 0), UnknownOracle);
}

TEST_CASE("metrics ledger on a mixed batch") {
  std::vector<EvalRecord> recs(5);

  // Fully coherent record: valid, goal-hitting, consistent, accurate.
  recs[0].id = "r1";
  recs[0].source = "Cc1ccccc1";
  recs[0].predicted = "Oc1ccccc1";
  recs[0].actions = {"replace [*:1]C connected at atom 1 with [*:1]O"};
  recs[0].ground_truths = {"Oc1ccccc1"};

  // No prediction, but the actions execute to the ground truth.
  recs[1].id = "r2";
  recs[1].source = "CCO";
  recs[1].actions = {"replace [*:1]O connected at atom 3 with [*:1]N"};
  recs[1].ground_truths = {"CCN"};

  // Nothing salvageable: prediction and actions both fail to parse.
  recs[2].id = "r3";
  recs[2].source = "CCO";
  recs[2].predicted = "C1CC";
  recs[2].actions = {"do something"};
  recs[2].ground_truths = {"CCC"};

  // Self-prediction without actions or ground truth.
  recs[3].id = "r4";
  recs[3].source = "CCO";
  recs[3].predicted = "CCO";

  // Valid but wrong: execution and ground truth disagree with the prediction.
  recs[4].id = "r5";
  recs[4].source = "Cc1ccccc1";
  recs[4].predicted = "Clc1ccccc1";
  recs[4].actions = {"replace [*:1]C connected at atom 1 with [*:1]Br"};
  recs[4].ground_truths = {"Brc1ccccc1", "Ic1ccccc1"};

  Goal goal;
  goal.oracle = "hbd";
  goal.increase = true;

  Metrics m = evaluate(recs, goal, OracleRegistry::builtin(), 0);
  CHECK(m.n_records == 5);
  CHECK(m.n_valid == 3);
  CHECK(m.validity == doctest::Approx(60.0).epsilon(1e-12));
  // r1: toluene vs phenol 1/3, r4: 1, r5: toluene vs chlorobenzene 1/3.
  CHECK(m.mean_similarity == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  CHECK(m.n_success == 1);  // only r1 gains a donor
  CHECK(m.success_rate == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(m.n_consistency_eligible == 3);  // r1, r2, r5 carry parseable actions
  CHECK(m.n_consistent == 1);            // r1 alone reproduces its prediction
  CHECK(m.consistency == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
  CHECK(m.n_accuracy_eligible == 4);  // r4 has no ground truth
  CHECK(m.n_accurate == 2);           // r1 directly, r2 via execution
  CHECK(m.execution_accuracy == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("ground truths accept any listed permutation") {
  // The symmetric core yields two products; either satisfies the record.
  EvalRecord rec;
  rec.source = "Cc1ccc(O)cc1";
  rec.actions = {"replace [*:1]c1ccc([*:2])cc1 with [*:1]c1ccc([*:2])cn1"};
  rec.ground_truths = {canonical_smiles(parse_smiles("Cc1ccc(O)cn1"))};

  Metrics m = evaluate({rec}, std::nullopt, OracleRegistry::builtin(), 0);
  CHECK(m.n_accuracy_eligible == 1);
  CHECK(m.n_accurate == 1);
  CHECK(m.execution_accuracy == 100.0);

  rec.ground_truths = {canonical_smiles(parse_smiles("Cc1ccc(O)nc1"))};
  Metrics m2 = evaluate({rec}, std::nullopt, OracleRegistry::builtin(), 0);
  CHECK(m2.n_accurate == 1);
}

TEST_CASE("goal direction and margin gate the success count") {
  EvalRecord rec;
  rec.source = "CCO";
  rec.predicted = "CCCCO";

  Goal up;
  up.oracle = "heavy_atoms";
  up.increase = true;
  CHECK(evaluate({rec}, up, OracleRegistry::builtin(), 0).n_success == 1);

  Goal down = up;
  down.increase = false;
  CHECK(evaluate({rec}, down, OracleRegistry::builtin(), 0).n_success == 0);

  Goal big = up;
  big.margin = 2.0;  // gained exactly 2 heavy atoms, need more than that
  CHECK(evaluate({rec}, big, OracleRegistry::builtin(), 0).n_success == 0);
  big.margin = 1.5;
  CHECK(evaluate({rec}, big, OracleRegistry::builtin(), 0).n_success == 1);
}

TEST_CASE("evaluation is deterministic") {
  std::vector<EvalRecord> recs(2);
  recs[0].source = "Cc1cccc(CC)c1";
  recs[0].actions = {"replace [*:1]C with [*:1]Br"};  // ambiguous site
  recs[0].ground_truths = {"Brc1cccc(CC)c1"};
  recs[1].source = "CCO";
  recs[1].predicted = "CCO";

  Metrics a = evaluate(recs, std::nullopt, OracleRegistry::builtin(), 7);
  Metrics b = evaluate(recs, std::nullopt, OracleRegistry::builtin(), 7);
  CHECK(a.n_accurate == b.n_accurate);
  CHECK(a.mean_similarity == b.mean_similarity);
  CHECK(a.validity == b.validity);
}

TEST_CASE("rate identities hold") {
  std::vector<EvalRecord> recs(4);
  for (size_t i = 0; i < recs.size(); ++i) {
    recs[i].source = "CCO";
    recs[i].predicted = i % 2 ? "CCN" : "not-a-molecule((";
  }
  Metrics m = evaluate(recs, std::nullopt, OracleRegistry::builtin(), 0);
  CHECK(m.validity * double(m.n_records) ==
        doctest::Approx(100.0 * double(m.n_valid)).epsilon(1e-12));
  CHECK(m.n_valid == 2);
  CHECK(m.n_consistency_eligible == 0);
  CHECK(m.consistency == 0.0);
  CHECK(m.execution_accuracy == 0.0);
}

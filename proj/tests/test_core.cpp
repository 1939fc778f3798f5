#include <doctest.h>

#include "support.hpp"
#include "warpdiff/csv.hpp"
#include "warpdiff/json_io.hpp"
#include "warpdiff/sha256.hpp"
#include "warpdiff/types.hpp"

using namespace warpdiff;

namespace {

TimingMatrix small_matrix() {
  TimingMatrix m;
  m.case_ids = {"a", "b", "c"};
  m.runtime_ids = {"r1", "r2", "r3"};
  m.values = {1.0, 2.0, 3.0, 0.5, 1.0, 1.5, 2.0, 4.0, 6.0};
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("validate_matrix accepts a positive matrix unchanged") {
  TimingMatrix m = small_matrix();
  CHECK(validate_matrix(m) == m);
}

TEST_CASE("validate_matrix rejects a zero total entry") {
  TimingMatrix m = small_matrix();
  m.at(1, 2) = 0.0;
  CHECK_THROWS_WITH_AS(validate_matrix(m), doctest::Contains("must be > 0"), Error);
  try {
    validate_matrix(m);
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_positive_entry);
  }
}

TEST_CASE("validate_matrix rejects non-finite entries") {
  TimingMatrix m = small_matrix();
  m.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(validate_matrix(m), Error);
}

TEST_CASE("validate_matrix needs at least two runtimes") {
  TimingMatrix m;
  m.case_ids = {"a"};
  m.runtime_ids = {"only"};
  m.values = {5.0};
  try {
    validate_matrix(m);
    FAIL("expected TooFewRuntimes");
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_few_runtimes);
  }
}

TEST_CASE("validate_matrix reports duplicate ids by name") {
  TimingMatrix m = small_matrix();
  m.case_ids[2] = "a";
  try {
    validate_matrix(m);
    FAIL("expected DuplicateId");
  } catch (const Error& e) {
    CHECK(e.code() == errc::duplicate_id);
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
}

TEST_CASE("validate_matrix canonicalizes row and column order") {
  TimingMatrix m;
  m.case_ids = {"b", "a"};
  m.runtime_ids = {"r2", "r1"};
  // b: r2=4, r1=3 / a: r2=2, r1=1
  m.values = {4.0, 3.0, 2.0, 1.0};

  TimingMatrix v = validate_matrix(m);
  CHECK(v.case_ids == std::vector<std::string>{"a", "b"});
  CHECK(v.runtime_ids == std::vector<std::string>{"r1", "r2"});
  CHECK(v.at(0, 0) == 1.0);
  CHECK(v.at(0, 1) == 2.0);
  CHECK(v.at(1, 0) == 3.0);
  CHECK(v.at(1, 1) == 4.0);

  // Idempotent: a second validation is a no-op.
  CHECK(validate_matrix(v) == v);
}

TEST_CASE("per-stage matrices allow zeros but not all-zero rows") {
  TimingMatrix m = small_matrix();
  m.stage = Stage::load;
  m.at(0, 0) = 0.0;
  CHECK_NOTHROW(validate_matrix(m));

  m.at(0, 1) = 0.0;
  m.at(0, 2) = 0.0;
  try {
    validate_matrix(m);
    FAIL("expected NonPositiveEntry");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_positive_entry);
  }
}

TEST_CASE("stage timing invariants") {
  StageTiming t;
  t.total_s = 1.0;
  CHECK_NOTHROW(t.validate());

  t.stages_present = true;
  t.init_s = 0.2;
  t.load_s = 0.3;
  t.exec_s = 0.46;  // sums to 0.96, within 5% of 1.0
  CHECK_NOTHROW(t.validate());

  t.exec_s = 0.40;  // sums to 0.90, 10% off
  CHECK_THROWS_AS(t.validate(), Error);

  t = StageTiming{};
  t.total_s = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
  t.total_s = -1.0;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("runtime spec template invariants") {
  RuntimeSpec rt{"wasmtime", "Wasmtime", "wasmtime run {wasm} {args}",
                 ExecMode::aot, StageProbe::none};
  CHECK_NOTHROW(rt.validate());

  rt.command_template = "wasmtime run {args}";
  CHECK_THROWS_AS(rt.validate(), Error);

  rt.command_template = "run {wasm} {wasm}";
  CHECK_THROWS_AS(rt.validate(), Error);

  rt.command_template = "run {wasm}";
  rt.id = "";
  CHECK_THROWS_AS(rt.validate(), Error);
}

TEST_CASE("json round-trips preserve every domain value") {
  RuntimeSpec rt{"w3", "Wasm3", "wasm3 {wasm} {args}", ExecMode::interpreter,
                 StageProbe::external_profile};
  nlohmann::json j1 = rt;
  CHECK(j1.get<RuntimeSpec>() == rt);

  TestCase tc;
  tc.id = "bench/fib.c";
  tc.source_path = "/src/fib.c";
  tc.wasm_path = "/out/fib.wasm";
  tc.args = {"30", "--fast"};
  tc.stdin_data = "832040\n";
  tc.expected_stdout_digest = sha256_hex("832040\n");
  tc.expected_exit_code = 0;
  tc.tags = {"BenchmarkGame"};
  nlohmann::json j2 = tc;
  CHECK(j2.get<TestCase>() == tc);

  RunRecord rec;
  rec.case_id = tc.id;
  rec.runtime_id = rt.id;
  rec.rep_index = 3;
  rec.timing = StageTiming{0.01, 0.02, 0.97, 1.0001, true};
  rec.exit_code = 0;
  rec.stdout_digest = *tc.expected_stdout_digest;
  rec.status = RunStatus::ok;
  rec.cpu_s = 0.98;
  rec.mono_start_s = 1234.5;
  rec.mono_end_s = 1235.5001;
  nlohmann::json j3 = rec;
  CHECK(j3.get<RunRecord>() == rec);

  rec.status = RunStatus::wrong_output;
  rec.failure_stdout = "unexpected";
  rec.failure_stderr = "boom";
  rec.cpu_s = std::nullopt;
  nlohmann::json j4 = rec;
  CHECK(j4.get<RunRecord>() == rec);

  TimingMatrix m = small_matrix();
  m.values[4] = 0.1234567890123456789;  // exercises shortest-exact doubles
  nlohmann::json j5 = m;
  CHECK(j5.get<TimingMatrix>() == m);
}

TEST_CASE("csv round-trips a matrix exactly") {
  TimingMatrix m = small_matrix();
  m.values[0] = 1.0 / 3.0;
  m.values[7] = 6.02214076e23;
  m.values[8] = 1.616255e-35;

  TimingMatrix back = matrix_from_csv(matrix_to_csv(m));
  CHECK(back == m);
}

TEST_CASE("csv parser reports malformed input") {
  try {
    matrix_from_csv("case_id,r1,r2\nrow,1.0\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == errc::parse_error);
  }
  try {
    matrix_from_csv("case_id,r1,r2\nrow,1.0,banana\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == errc::parse_error);
  }
  try {
    matrix_from_csv("not,a,matrix\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == errc::parse_error);
  }
}

TEST_CASE("sha256 matches published vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex(
            "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");

  // Chunked updates agree with one-shot hashing.
  Sha256 h;
  std::string data(1000, 'x');
  for (int i = 0; i < 5; ++i) h.update(data);
  CHECK(h.hex_digest() == sha256_hex(std::string(5000, 'x')));
}

TEST_SUITE_END();

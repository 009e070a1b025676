#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

// End-to-end tests against the installed binary; DDC_CLI_PATH and
// DDC_FIXTURES_DIR come from the build system.

namespace {

const std::string kCli = DDC_CLI_PATH;
const std::string kFixtures = DDC_FIXTURES_DIR;

struct RunResult {
    int exit_code;
    std::string out;  // stdout only; stderr goes to the terminal
};

RunResult run(const std::string& args) {
    const std::string cmd = kCli + " " + args;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), out};
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/ddc_cli_" + name) {}
    ~TempFile() {
        std::remove(path.c_str());
        std::remove((path + ".manifest.json").c_str());
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("verify exit codes") {
    SECTION("orthogonal fixture passes") {
        const auto r = run("verify " + fixture("pauli_d2.json"));
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("PASS") != std::string::npos);
    }
    SECTION("non-orthogonal pair fails with its residual printed") {
        const auto r = run("verify " + fixture("bad_pair_d2.json"));
        CHECK(r.exit_code == 2);
        CHECK(r.out.find("4.000e-01") != std::string::npos);
        CHECK(r.out.find("FAIL") != std::string::npos);
    }
    SECTION("truncated file is an input error") {
        CHECK(run("verify " + fixture("malformed.json") + " 2>/dev/null").exit_code == 1);
    }
    SECTION("unsorted lambdas are an input error") {
        CHECK(run("verify " + fixture("unsorted_lambdas.json") + " 2>/dev/null").exit_code == 1);
    }
    SECTION("missing file is an input error") {
        CHECK(run("verify /nonexistent/family.json 2>/dev/null").exit_code == 1);
    }
    SECTION("loose tolerance flips a near miss") {
        const auto r = run("verify " + fixture("bad_pair_d2.json") + " --tol 0.5");
        CHECK(r.exit_code == 0);
    }
    SECTION("verbose table lists every pair") {
        const auto r = run("verify --verbose " + fixture("pauli_d2.json"));
        CHECK(r.exit_code == 0);
        // 4 members: 10 unordered pairs with the diagonal
        std::size_t lines = 0;
        for (const char c : r.out)
            if (c == '\n') ++lines;
        CHECK(lines >= 12);
    }
}

TEST_CASE("bounds table values") {
    SECTION("d=3 K=4 shows the counting and d+1 caps") {
        const auto r = run("bounds --d 3 --k 4");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("0.750000") != std::string::npos);
        CHECK(r.out.find("0.723607") != std::string::npos);
    }
    SECTION("d=3 K=5 with two pinned shift powers") {
        const auto r = run("bounds --d 3 --k 5 --pinned-shift-powers 2 --lambda2-zero");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("0.600000") != std::string::npos);
        CHECK(r.out.find("0.5921") != std::string::npos);
    }
    SECTION("out-of-range K is an input error") {
        CHECK(run("bounds --d 3 --k 10 2>/dev/null").exit_code == 1);
        CHECK(run("bounds --d 1 --k 1 2>/dev/null").exit_code == 1);
    }
    SECTION("json mode emits the caps") {
        const auto r = run("bounds --d 3 --k 4 --json");
        CHECK(r.exit_code == 0);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["counting"].get<double>() == 0.75);
        CHECK(doc["dp1_family"].get<double>() == Catch::Approx(0.7236067977).epsilon(1e-9));
        CHECK(doc["applicable_min"].get<double>() < 0.75);
    }
}

TEST_CASE("construct, verify, augment round-trip for d = 2..5") {
    for (std::size_t d = 2; d <= 5; ++d) {
        DYNAMIC_SECTION("d = " << d) {
            TempFile fam("rt_d" + std::to_string(d) + ".json");
            TempFile mat("rt_d" + std::to_string(d) + "_m.json");
            CHECK(run("construct pauli --d " + std::to_string(d) + " --out " + fam.path)
                      .exit_code == 0);
            CHECK(run("verify " + fam.path).exit_code == 0);
            const auto a = run("augment " + fam.path + " --out " + mat.path + " --json");
            CHECK(a.exit_code == 0);
            const auto doc = nlohmann::json::parse(a.out);
            CHECK(doc["ok"].get<bool>());
            CHECK(doc["completion_columns"].get<std::size_t>() == 0);
            // the written matrix is the full d^2 x d^2 block
            const auto stored = nlohmann::json::parse(slurp(mat.path));
            CHECK(stored["matrix"].size() == d * d);
        }
    }
}

TEST_CASE("completing a d^2-1 family") {
    TempFile out("completed_d2.json");
    const auto r = run("construct complete --in " + fixture("partial_d2.json") + " --out " +
                       out.path);
    CHECK(r.exit_code == 0);
    CHECK(run("verify " + out.path).exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(out.path));
    CHECK(doc["unitaries"].size() == 4);

    SECTION("refuses a non-uniform spectrum") {
        CHECK(run("construct complete --in " + fixture("bad_pair_d2.json") +
                  " --out /tmp/ddc_cli_never.json 2>/dev/null")
                  .exit_code == 1);
    }
}

TEST_CASE("search outcomes and determinism") {
    SECTION("feasible point succeeds and the file verifies") {
        TempFile out("s_d3k4.json");
        const auto r = run("search --d 3 --lambdas 2/3,1/3,0 --k 4 --pin I,X --seed 11 --out " +
                           out.path);
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("success") != std::string::npos);
        CHECK(run("verify --tol 1e-6 " + out.path).exit_code == 0);
    }
    SECTION("certified infeasible point reports its reason") {
        const auto r = run("search --d 3 --lambdas 0.76,0.12,0.12 --k 4");
        CHECK(r.exit_code == 2);
        CHECK(r.out.find("counting bound") != std::string::npos);
    }
    SECTION("budget exhaustion without a certificate") {
        const auto r =
            run("search --d 3 --lambdas 0.6,0.2,0.2 --k 5 --restarts 2 --max-iters 200 --json");
        CHECK(r.exit_code == 2);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK_FALSE(doc["success"].get<bool>());
        CHECK_FALSE(doc["certified"].get<bool>());
    }
    SECTION("same command and seed give byte-identical families") {
        TempFile a("det_a.json"), b("det_b.json");
        const std::string base = "search --d 2 --lambdas 0.6,0.4 --k 2 --seed 5 --out ";
        CHECK(run(base + a.path).exit_code == 0);
        CHECK(run(base + b.path).exit_code == 0);
        CHECK(slurp(a.path) == slurp(b.path));
    }
    SECTION("unsorted lambdas are re-sorted, not rejected") {
        const auto r = run("search --d 2 --lambdas 0.4,0.6 --k 2 --json 2>/dev/null");
        CHECK(r.exit_code == 0);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["lambdas"][0].get<double>() == 0.6);
    }
    SECTION("bad lambda token is an input error") {
        CHECK(run("search --d 2 --lambdas 0.6,zzz --k 2 2>/dev/null").exit_code == 1);
        CHECK(run("search --d 2 --lambdas 1/0,1 --k 2 2>/dev/null").exit_code == 1);
        CHECK(run("search --d 3 --lambdas 0.6,0.4 --k 2 2>/dev/null").exit_code == 1);
    }
    SECTION("bad pin token is an input error") {
        CHECK(run("search --d 2 --lambdas 0.5,0.5 --k 2 --pin Q 2>/dev/null").exit_code == 1);
    }
}

TEST_CASE("deficit identity table on a single-member family") {
    const auto r = run("augment " + fixture("single_d2.json"));
    CHECK(r.exit_code == 0);
    // d - K lambda_j = 1 and 2; the completion weights must match
    CHECK(r.out.find("1.000000") != std::string::npos);
    CHECK(r.out.find("2.000000") != std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("augment accepts every committed family fixture") {
    const char* names[] = {"pauli_d2.json",     "pauli_d3.json",     "pauli_d4.json",
                           "family_d2_k3.json", "family_d3_k4.json", "family_d3_k5.json",
                           "family_d4_k5.json"};
    for (const char* name : names) {
        DYNAMIC_SECTION(name) {
            CHECK(run("augment " + fixture(name)).exit_code == 0);
        }
    }
}

TEST_CASE("scan output shape") {
    TempFile csv("scan.csv");
    const auto r =
        run("scan --step 0.1 --restarts 4 --max-iters 800 --seed 9 --out " + csv.path);
    CHECK(r.exit_code == 0);
    const std::string text = slurp(csv.path);
    CHECK(text.rfind("lambda0,lambda1,lambda2,max_k_found,wcsg_cap,certified_infeasible_above\n",
                     0) == 0);
    std::size_t lines = 0;
    for (const char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 13);  // header + 12 grid points at step 0.1

    SECTION("identical reruns give identical CSV") {
        TempFile again("scan2.csv");
        CHECK(run("scan --step 0.1 --restarts 4 --max-iters 800 --seed 9 --out " + again.path)
                  .exit_code == 0);
        CHECK(slurp(again.path) == text);
    }
    SECTION("step outside the supported range is an input error") {
        CHECK(run("scan --step 0.2 --out /tmp/ddc_cli_never.csv 2>/dev/null").exit_code == 1);
    }
}

TEST_CASE("manifests accompany every written file") {
    TempFile fam("man.json");
    CHECK(run("construct pauli --d 2 --out " + fam.path).exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(fam.path + ".manifest.json"));
    CHECK(doc["subcommand"].get<std::string>() == "construct");
    CHECK(doc["tool_version"].get<std::string>() == std::string("0.1.0"));
    CHECK(doc.contains("inputs"));
    CHECK(doc.contains("seed"));
    // ISO-8601 UTC, e.g. 2026-01-31T12:00:00Z
    const auto ts = doc["timestamp"].get<std::string>();
    CHECK(ts.size() == 20);
    CHECK(ts[4] == '-');
    CHECK(ts[10] == 'T');
    CHECK(ts.back() == 'Z');
}

TEST_CASE("json stdout parses for every subcommand") {
    TempFile fam("js.json");
    const auto c = run("construct pauli --d 3 --out " + fam.path + " --json");
    CHECK(nlohmann::json::parse(c.out)["k"].get<std::size_t>() == 9);
    const auto v = run("verify " + fam.path + " --json");
    CHECK(nlohmann::json::parse(v.out)["ok"].get<bool>());
    const auto a = run("augment " + fam.path + " --json");
    CHECK(nlohmann::json::parse(a.out)["defect"].get<double>() < 1e-12);
}

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcm/allocate.hpp"
#include "fcm/dataset.hpp"
#include "fcm/layout.hpp"
#include "fcm/oracle.hpp"
#include "fcm/sketches.hpp"

using nlohmann::json;

namespace {

struct cli_result {
    int exit_code = -1;
    std::string output;
};

// Runs the driver binary through the shell, capturing stdout and stderr.
cli_result run_cli(const std::string& args) {
    const std::string cmd = std::string(FCM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    cli_result r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) {
        r.output.append(buf, got);
    }
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// Same, but with an environment assignment prefix.
cli_result run_cli_env(const std::string& env, const std::string& args) {
    const std::string cmd = env + " " + std::string(FCM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    cli_result r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) {
        r.output.append(buf, got);
    }
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fresh_dir() {
    char tmpl[] = "/tmp/fcm_cli_XXXXXX";
    char* dir = mkdtemp(tmpl);
    REQUIRE(dir != nullptr);
    return std::string(dir);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t parse_uint_line(const std::string& text, const std::string& prefix) {
    const auto pos = text.find(prefix);
    REQUIRE(pos != std::string::npos);
    return std::stoull(text.substr(pos + prefix.size()));
}

// Strips the two wall-clock columns so reruns can be compared byte for byte.
std::string without_timing_columns(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (fields.size() == 13) {
            fields[10] = "-";
            fields[11] = "-";
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << fields[i];
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

TEST_CASE("alloc prints the width split as JSON") {
    const auto r = run_cli("alloc --sizes 50,50 --w 10 --d 1");
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.output);
    REQUIRE(out["widths"] == json::array({5, 5}));
    REQUIRE(out["residuals"].size() == 1);
}

TEST_CASE("alloc handles more than two groups") {
    const auto r = run_cli("alloc --sizes 10,20,70 --w 10 --d 1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(json::parse(r.output)["widths"] == json::array({1, 2, 7}));
}

TEST_CASE("alloc balances expected collisions at depth two") {
    const auto r = run_cli("alloc --sizes 3,9 --w 8 --d 2");
    REQUIRE(r.exit_code == 0);
    REQUIRE(json::parse(r.output)["widths"] == json::array({2, 6}));
}

TEST_CASE("alloc exits with the usage code when no split fits") {
    const auto r = run_cli("alloc --sizes 1,1,1 --w 2 --d 1");
    REQUIRE(r.exit_code == 2);
}

TEST_CASE("gen writes identical files for identical seeds") {
    const std::string dir = fresh_dir();
    const std::string a = dir + "/a.csv", b = dir + "/b.csv", c = dir + "/c.csv";
    REQUIRE(run_cli("gen --dist zipf:1.1 --n 50 --seed 9 --group threshold:8 --out " + a)
                .exit_code == 0);
    REQUIRE(run_cli("gen --dist zipf:1.1 --n 50 --seed 9 --group threshold:8 --out " + b)
                .exit_code == 0);
    REQUIRE(run_cli("gen --dist zipf:1.1 --n 50 --seed 10 --group threshold:8 --out " + c)
                .exit_code == 0);
    REQUIRE(slurp(a) == slurp(b));
    REQUIRE(slurp(a) != slurp(c));
    const auto summary = json::parse(slurp(a + ".json"));
    REQUIRE(summary["elements"] == 50);
    REQUIRE(summary["groups"].size() == 2);
}

TEST_CASE("gen sidecar summary matches the written stream") {
    const std::string dir = fresh_dir();
    const std::string path = dir + "/two.csv";
    const auto r = run_cli("gen --dist \"2pop:gaussian:100,50;gaussian:1000,500\" --n 60 --nl 40"
                           " --seed 4 --out " + path);
    REQUIRE(r.exit_code == 0);
    const fcm::frequency_oracle oracle(fcm::read_dataset_csv(path));
    REQUIRE(oracle.elements() == 60);
    REQUIRE(oracle.group_name(0) == "low");
    REQUIRE(oracle.group_elements(0) == 40);
    REQUIRE(oracle.group_elements(1) == 20);
    const auto summary = json::parse(slurp(path + ".json"));
    REQUIRE(summary["total_mass"] == oracle.total_mass());
    REQUIRE(summary["groups"][0]["mass"] == oracle.group_mass(0));
}

TEST_CASE("gen refuses grouping flags that do not apply") {
    const std::string dir = fresh_dir();
    REQUIRE(run_cli("gen --dist zipf:1.0 --n 20 --out " + dir + "/x.csv").exit_code == 2);
    REQUIRE(run_cli("gen --dist \"2pop:zipf:1.0;zipf:1.0\" --n 20 --group threshold:5 --out " +
                    dir + "/y.csv")
                .exit_code == 2);
    REQUIRE(run_cli("gen --dist warp:9 --n 20 --group threshold:5 --out " + dir + "/z.csv")
                .exit_code == 2);
}

TEST_CASE("run writes the results schema and reproduces itself") {
    const std::string dir = fresh_dir();
    const std::string data = dir + "/stream.csv";
    REQUIRE(run_cli("gen --dist \"2pop:gaussian:100,50;gaussian:1000,500\" --n 80 --nl 50"
                    " --seed 12 --out " + data)
                .exit_code == 0);
    const std::string out1 = dir + "/r1.csv", out2 = dir + "/r2.csv";
    const std::string args = "run --experiment unfairness --sweep w --values 16,32"
                             " --dataset " + data + " --w 32 --d 2 --trials 2 --seed 5 --out ";
    REQUIRE(run_cli(args + out1).exit_code == 0);
    REQUIRE(run_cli(args + out2).exit_code == 0);
    const std::string csv = slurp(out1);
    REQUIRE(csv.rfind("experiment,sketch,sweep_var,sweep_value,trial,group,mean_alpha,unfairness,"
                      "total_additive_error,pof,build_ms,query_ns,status\n", 0) == 0);
    REQUIRE(without_timing_columns(csv) == without_timing_columns(slurp(out2)));
    // per (sketch, value): 2 trials x 2 groups + 2 summary rows; 2 sketches, 2 values
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    REQUIRE(lines == 1 + 2 * 2 * (2 * 2 + 2));
    REQUIRE(csv.find(",mean,") != std::string::npos);
    REQUIRE(csv.find(",ok\n") != std::string::npos);
}

TEST_CASE("run marks sweep points that cannot be allocated") {
    const std::string dir = fresh_dir();
    const std::string data = dir + "/stream.csv";
    REQUIRE(run_cli("gen --dist \"2pop:zipf:1.0;gaussian:200,40\" --n 40 --seed 3 --out " + data)
                .exit_code == 0);
    const std::string out = dir + "/res.csv";
    REQUIRE(run_cli("run --experiment unfairness --sweep w --values 1,8 --dataset " + data +
                    " --w 8 --d 1 --trials 1 --seed 2 --out " + out)
                .exit_code == 0);
    const std::string csv = slurp(out);
    std::istringstream lines(csv);
    std::string line;
    bool saw_infeasible = false, saw_cm_at_one = false;
    while (std::getline(lines, line)) {
        if (line.rfind("unfairness,fcm,w,1,", 0) == 0) {
            REQUIRE(line.find(",-,-,") != std::string::npos);
            REQUIRE(line.substr(line.size() - 11) == ",infeasible");
            saw_infeasible = true;
        }
        if (line.rfind("unfairness,cm,w,1,", 0) == 0 && line.find(",ok") != std::string::npos) {
            saw_cm_at_one = true;
        }
    }
    REQUIRE(saw_infeasible);
    REQUIRE(saw_cm_at_one);
}

TEST_CASE("run sweeps the low-group size by regenerating two-population streams") {
    const std::string dir = fresh_dir();
    const std::string out = dir + "/nl.csv";
    const auto r = run_cli("run --experiment pof --sweep n_l --values 10,30"
                           " --dataset \"2pop:gaussian:100,50;gaussian:1000,500\" --n 40"
                           " --w 64 --d 1 --trials 2 --seed 8 --out " + out);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(out);
    REQUIRE(csv.find("pof,cm,n_l,10,") != std::string::npos);
    REQUIRE(csv.find("pof,fcm,n_l,30,") != std::string::npos);
}

TEST_CASE("mc-wl reports one mean per trial and the solver answer") {
    const auto r = run_cli("mc-wl --nl 20 --nh 20 --w 8 --d 1 --dist-l zipf:1.0"
                           " --dist-h zipf:1.0 --trials 6 --seed 3");
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.output);
    REQUIRE(out["per_trial"].size() == 6);
    REQUIRE(out["solver_wl"] == fcm::solve_two_group(20, 20, 8, 1));
    const double avg = out["avg_wl"];
    REQUIRE(avg >= 1.0);
    REQUIRE(avg <= 7.0);
}

TEST_CASE("estimate rebuilds the same plain sketch as the library") {
    const std::string dir = fresh_dir();
    const std::string data = dir + "/d.csv";
    std::ofstream(data) << "element,group,count\ne0,low,5\ne1,low,3\ne2,high,9\ne3,high,2\n"
                           "e4,low,1\ne5,high,4\n";
    const auto r = run_cli("estimate --dataset " + data + " --sketch cm --w 4 --d 2 --seed 11"
                           " --query e2");
    REQUIRE(r.exit_code == 0);
    fcm::count_min cm({4, 2, 11});
    const fcm::frequency_oracle oracle(fcm::read_dataset_csv(data));
    for (const auto& e : oracle.entries()) cm.update(e.key, e.frequency);
    REQUIRE(parse_uint_line(r.output, "estimate: ") == cm.estimate("e2"));
    REQUIRE(parse_uint_line(r.output, "frequency: ") == 9);
    // unseen keys still answer, without a frequency line
    const auto r2 = run_cli("estimate --dataset " + data + " --sketch cm --w 4 --d 2 --seed 11"
                            " --query nosuch");
    REQUIRE(r2.exit_code == 0);
    REQUIRE(parse_uint_line(r2.output, "estimate: ") == cm.estimate("nosuch"));
    REQUIRE(r2.output.find("frequency:") == std::string::npos);
}

TEST_CASE("estimate rebuilds the same partitioned sketch as the library") {
    const std::string dir = fresh_dir();
    const std::string data = dir + "/d.csv";
    std::ofstream(data) << "element,group,count\ne0,low,5\ne1,low,3\ne2,high,9\ne3,high,2\n"
                           "e4,low,1\ne5,high,4\n";
    const auto r = run_cli("estimate --dataset " + data + " --sketch fcm --w 6 --d 2 --seed 7"
                           " --query e1,low");
    REQUIRE(r.exit_code == 0);
    const fcm::frequency_oracle oracle(fcm::read_dataset_csv(data));
    const auto widths = fcm::solve_multi(oracle.group_element_counts(), 6, 2).widths;
    fcm::fair_count_min fc({6, 2, 7}, fcm::column_layout(widths));
    for (const auto& e : oracle.entries()) fc.update(e.key, e.group, e.frequency);
    REQUIRE(parse_uint_line(r.output, "estimate: ") == fc.estimate("e1", 0));
    REQUIRE(parse_uint_line(r.output, "frequency: ") == 3);
}

TEST_CASE("estimate on a partitioned sketch requires the group") {
    const std::string dir = fresh_dir();
    const std::string data = dir + "/d.csv";
    std::ofstream(data) << "element,group,count\ne0,low,5\ne1,high,3\n";
    REQUIRE(run_cli("estimate --dataset " + data + " --sketch fcm --w 4 --d 1 --query e0")
                .exit_code == 2);
    REQUIRE(run_cli("estimate --dataset " + data + " --sketch fcm --w 4 --d 1 --query e0,nope")
                .exit_code == 2);
}

TEST_CASE("usage errors exit with code two and help exits cleanly") {
    REQUIRE(run_cli("alloc --sizes 5,5").exit_code == 2);          // missing required options
    REQUIRE(run_cli("alloc --sizes 5,5 --w 8 --d 1 --bogus").exit_code == 2);
    REQUIRE(run_cli("nosuchcommand").exit_code == 2);
    REQUIRE(run_cli("--help").exit_code == 0);
    REQUIRE(run_cli("gen --help").exit_code == 0);
}

TEST_CASE("the seed environment variable stands in for --seed") {
    const std::string dir = fresh_dir();
    const std::string a = dir + "/a.csv", b = dir + "/b.csv";
    REQUIRE(run_cli("gen --dist zipf:1.0 --n 30 --seed 77 --group equiwidth:2 --out " + a)
                .exit_code == 0);
    REQUIRE(run_cli_env("FAIR_SKETCH_SEED=77",
                        "gen --dist zipf:1.0 --n 30 --group equiwidth:2 --out " + b)
                .exit_code == 0);
    REQUIRE(slurp(a) == slurp(b));
}

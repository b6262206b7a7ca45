// Black-box checks of the command-line binary: exit codes, file outputs,
// and byte-level determinism. Invoked with the binary path as argv[1].
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void check(bool ok, const std::string& label) {
    std::printf("%-58s %s\n", label.c_str(), ok ? "pass" : "FAIL");
    if (!ok) ++failures;
}

struct RunResult {
    int exit_code;
    std::string output; // stdout only
};

RunResult run(const std::string& command) {
    std::FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string output;
    std::array<char, 4096> buffer;
    while (std::fgets(buffer.data(), buffer.size(), pipe)) output += buffer.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_spawn_tests <binary>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "parambvp-cli-test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string out1 = (dir / "a").string(), out2 = (dir / "b").string();

    check(run(cli + " catalog list").exit_code == 0, "catalog list exits 0");
    check(run(cli + " catalog list").output.find("k0-eps") != std::string::npos,
          "catalog list names the families");

    const RunResult solve = run(cli + " solve --preset line --out " + out1);
    check(solve.exit_code == 0, "solve exits 0 on a solvable preset");
    {
        std::ifstream csv(dir / "a" / "solution.csv");
        std::string header;
        std::getline(csv, header);
        check(header == "t,z1_d0_re,z1_d0_im,z1_d1_re,z1_d1_im",
              "solution.csv carries the documented column layout");
    }

    check(run(cli + " solve --preset nosuch --out " + out1).exit_code == 1,
          "unknown preset exits 1");
    check(run(cli + " solve --out " + out1).exit_code == 1,
          "missing --preset/--config exits 1");
    check(run(cli + " solve --preset line --config x.json").exit_code == 1,
          "both --preset and --config exits 1");
    check(run(cli + " solve --preset line --grid 5").exit_code == 1, "odd --grid exits 1");
    check(run(cli + " nonsense").exit_code == 1, "unknown subcommand exits 1");

    check(run(cli + " solve --preset dirichlet-eigen --out " + out1).exit_code == 2,
          "degenerate limit problem exits 2");
    check(run(cli + " sweep --preset eigen-family --out " + out1).exit_code == 2,
          "sweep with a degenerate limit exits 2");

    const std::string sweep_cmd = " sweep --preset k0-eps --jobs 3 --out ";
    check(run(cli + sweep_cmd + out1).exit_code == 0, "sweep exits 0");
    run(cli + " sweep --preset k0-eps --jobs 1 --out " + out2);
    const std::string s1 = slurp(dir / "a" / "sweep.csv");
    const std::string s2 = slurp(dir / "b" / "sweep.csv");
    check(!s1.empty() && s1 == s2, "sweep.csv is byte-identical across job counts");
    check(s1.rfind("eps,err,d_n,ratio,within_bounds\n", 0) == 0,
          "sweep.csv carries the documented column layout");
    check(s1.find("\nkappa1,") != std::string::npos &&
              s1.find("\nkappa2,") != std::string::npos &&
              s1.find("\nverdict,continuous") != std::string::npos,
          "sweep.csv ends with the kappa and verdict footer");

    check(run(cli + " check --preset osc-k --out " + out1).exit_code == 0, "check exits 0");
    check(slurp(dir / "a" / "conditions.csv").rfind("condition,pass,witness\n", 0) == 0,
          "conditions.csv carries the documented column layout");

    const RunResult demo = run(cli + " demo-appendix");
    check(demo.exit_code == 0, "demo-appendix exits 0");
    check(demo.output.find("64") != std::string::npos, "demo table reaches n = 64");

    check(run(cli + " --help").exit_code == 0, "--help exits 0");

    std::filesystem::remove_all(dir);
    if (failures) std::printf("%d spawn check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

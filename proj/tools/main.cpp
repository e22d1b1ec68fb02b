#include <iostream>
#include <string>
#include <vector>

#include "expr.hpp"
#include "job.hpp"
#include "run.hpp"
#include "tscalc/errors.hpp"

namespace {

constexpr const char* kUsage =
    "usage: tscalc <command> [--flag value ...]\n"
    "\n"
    "commands:\n"
    "  partition      print the atomic partition and switching points\n"
    "  eval-exp       table of delta/nabla (and combined) exponentials\n"
    "  solve          propagate the diamond-alpha boundary-value problem\n"
    "  verify         run the identity suite for the given spec\n"
    "  regress-check  report regressivity of p on the time scale\n"
    "\n"
    "flags: --ts --alpha --p --f --t0 --y0 --targets --tol --out --cmd --job\n"
    "  --job FILE reads key=value defaults; command-line flags override.\n"
    "  TSCALC_MAX_FACTORS caps infinite-product truncation (default 1000000).\n"
    "\n"
    "examples:\n"
    "  tscalc solve --ts \"grid(1,-inf,inf)\" --alpha 0.5 --p 0.5 --t0 1 --targets 0..6\n"
    "  tscalc eval-exp --ts \"grid(1,-inf,inf)\" --p 0.5 --t0 0 --targets 0..6\n"
    "  tscalc partition --ts \"interval(-1,0); qgrid(2,+)\"\n";

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        std::cout << kUsage;
        return args.empty() ? 2 : 0;
    }
    try {
        const tscalc::cli::JobSpec job = tscalc::cli::parse_command_line(args);
        return tscalc::cli::run_job(job, std::cout, std::cerr);
    } catch (const tscalc::cli::ParseError& e) {
        std::cerr << "parse error at offset " << e.offset() << ": " << e.what() << "\n";
        return 2;
    } catch (const tscalc::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 4;
    } catch (const tscalc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

#include "CLI11.hpp"
#include "json.hpp"

#include "qlab/qfock.hpp"
#include "qlab/suites.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Options {
    double q = 0.5;
    int dim = 2;
    int cutoff = 4;
    std::string group = "s3";
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    int trials = 10000;
    int resolution = 16;
    int maxlen = 6;
    int kdim = 2;
    std::vector<int> fsizes = {1, 2, 4};
    std::string suite = "all";
    std::string config_path;
    bool timing = false;
};

void apply_config(const CLI::App& cmd, Options& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) throw CLI::ValidationError("--config", "unreadable config file");
    nlohmann::json j;
    in >> j;
    const auto take = [&](const char* flag, auto& slot) {
        const auto* o = cmd.get_option_no_throw(flag);
        const bool overridden = o != nullptr && o->count() > 0;
        const char* key = flag + 2;  // strip leading dashes
        if (!overridden && j.contains(key)) j.at(key).get_to(slot);
    };
    take("--q", opt.q);
    take("--dim", opt.dim);
    take("--cutoff", opt.cutoff);
    take("--group", opt.group);
    take("--seed", opt.seed);
    take("--out", opt.out);
    take("--format", opt.format);
    take("--trials", opt.trials);
    take("--resolution", opt.resolution);
    take("--maxlen", opt.maxlen);
    take("--kdim", opt.kdim);
    take("--fsizes", opt.fsizes);
    take("--suite", opt.suite);
}

void emit(const std::vector<qlab::suites::Report>& reports, const Options& opt,
          double wall_seconds) {
    std::string text;
    const double stamp = opt.timing ? wall_seconds : -1.0;
    if (opt.format == "csv") {
        for (const auto& r : reports) {
            const std::string csv = r.to_csv();
            if (!text.empty()) {
                // drop the duplicate header of subsequent suites
                text += csv.substr(csv.find('\n') + 1);
            } else {
                text = csv;
            }
        }
    } else if (reports.size() == 1) {
        text = reports[0].to_json(stamp);
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(nlohmann::json::parse(r.to_json(stamp)));
        text = arr.dump(2) + "\n";
    }
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out);
        if (!out) throw CLI::ValidationError("--out", "cannot open output file");
        out << text;
    }
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--q", opt.q, "deformation parameter, |q| < 1 for matrix suites");
    cmd->add_option("--dim", opt.dim, "one-particle dimension");
    cmd->add_option("--cutoff", opt.cutoff, "tensor degree cutoff");
    cmd->add_option("--group", opt.group, "builtin group name or JSON file path");
    cmd->add_option("--seed", opt.seed, "master seed; module seeds are derived from it");
    cmd->add_option("--out", opt.out, "output path (default stdout)");
    cmd->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--trials", opt.trials, "adversarial search trials");
    cmd->add_option("--resolution", opt.resolution, "torus grid resolution");
    cmd->add_option("--maxlen", opt.maxlen, "maximum moment word length");
    cmd->add_option("--kdim", opt.kdim, "coefficient-space dimension for the crossed product");
    cmd->add_option("--fsizes", opt.fsizes, "family sizes for the gap sweep");
    cmd->add_option("--config", opt.config_path, "JSON config file; flags override its values");
    cmd->add_flag("--timing", opt.timing,
                  "include wall-clock seconds in reports (breaks byte-for-byte determinism)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for deformed Gaussian algebras"};
    app.require_subcommand(1);
    Options opt;

    auto* moments = app.add_subcommand("moments", "moment table: state route vs pairing sum");
    auto* verify = app.add_subcommand("verify", "run a module invariant suite");
    auto* gap = app.add_subcommand("gap", "coercivity-gap sweep over family sizes");
    auto* rigidity = app.add_subcommand("rigidity", "torus invariance defects and adversary");
    for (auto* cmd : {moments, verify, gap, rigidity}) add_common(cmd, opt);
    verify->add_option("--suite", opt.suite, "fock, wick, gqg, rigidity, or all")
        ->check(CLI::IsMember({"fock", "wick", "gqg", "rigidity", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    using qlab::suites::derive_seed;
    try {
        CLI::App* cmd = app.get_subcommands().front();
        apply_config(*cmd, opt);
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<qlab::suites::Report> reports;
        if (cmd == moments) {
            reports.push_back(qlab::suites::moments_table(opt.q, opt.maxlen));
        } else if (cmd == gap) {
            reports.push_back(qlab::suites::gap_sweep(opt.fsizes, opt.q, opt.cutoff));
        } else if (cmd == rigidity) {
            reports.push_back(qlab::suites::suite_rigidity(opt.resolution, opt.trials,
                                                           derive_seed(opt.seed, "rigidity")));
        } else {
            if (opt.suite == "fock" || opt.suite == "all")
                reports.push_back(qlab::suites::suite_fock(opt.q, opt.dim, opt.cutoff,
                                                           derive_seed(opt.seed, "fock")));
            if (opt.suite == "wick" || opt.suite == "all")
                reports.push_back(qlab::suites::suite_wick(opt.q, derive_seed(opt.seed, "wick")));
            if (opt.suite == "gqg" || opt.suite == "all")
                reports.push_back(qlab::suites::suite_gqg(opt.group, opt.q, opt.kdim, opt.cutoff,
                                                          derive_seed(opt.seed, "gqg")));
            if (opt.suite == "rigidity" || opt.suite == "all")
                reports.push_back(qlab::suites::suite_rigidity(
                    opt.resolution, opt.trials, derive_seed(opt.seed, "rigidity")));
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit(reports, opt, wall);
        for (const auto& r : reports)
            if (!r.pass()) return 1;
        return 0;
    } catch (const qlab::fock::ResourceError& e) {
        std::cerr << "resource guard: " << e.what() << "\n";
        return 3;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

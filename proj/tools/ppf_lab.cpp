#include <CLI11.hpp>

#include <sstream>

#include "ppf/commands.hpp"

namespace {

std::vector<std::string> split_methods(const std::string& arg) {
    std::vector<std::string> out;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven probabilistic power flow pipeline"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    ppf::cmd::Options opt;
    std::string methods_arg;

    auto add_common = [&](CLI::App* sub, bool with_methods) {
        sub->add_option("--config", opt.config_path, "run config file (JSON)")
            ->required();
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { opt.seed = v; },
            "override the run seed");
        sub->add_option_function<std::string>(
            "--out", [&](const std::string& v) { opt.out = v; },
            "override the output directory");
        if (with_methods)
            sub->add_option("--methods", methods_arg,
                            "comma-separated subset of M1,M2,M3,M4");
    };

    auto* gen = app.add_subcommand("gen-data", "generate the Monte Carlo dataset");
    add_common(gen, false);
    auto* train = app.add_subcommand("train", "train estimator bundles");
    add_common(train, true);
    train->add_flag("--force", opt.force, "retrain over an existing bundle");
    auto* eval = app.add_subcommand("eval", "evaluate bundles on the test split");
    add_common(eval, true);
    auto* sweep = app.add_subcommand("sweep", "validation sweeps for gamma and alpha");
    add_common(sweep, false);
    auto* report = app.add_subcommand("report", "print the stored metrics report");
    add_common(report, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? ppf::cmd::kExitUsage : ppf::cmd::kExitOk;
    }

    if (!methods_arg.empty()) opt.methods = split_methods(methods_arg);

    if (gen->parsed()) return ppf::cmd::gen_data(opt);
    if (train->parsed()) return ppf::cmd::train(opt);
    if (eval->parsed()) return ppf::cmd::eval(opt);
    if (sweep->parsed()) return ppf::cmd::sweep(opt);
    if (report->parsed()) return ppf::cmd::report(opt);
    return ppf::cmd::kExitUsage;
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "planrec/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace planrec::cli;
    CLI::App app{"planrec: context-aware plan recognition over discrete Bayesian networks"};
    app.require_subcommand(1);
    Options o;

    auto add_net = [&](CLI::App* sub) {
        sub->add_option("--net", o.net, "traffic | traffic-mini | path to a network JSON file")
            ->capture_default_str();
        sub->add_option("--params", o.params, "traffic parameters JSON (builtin networks only)");
    };

    auto* query = app.add_subcommand("query", "posterior table for scenario targets");
    add_net(query);
    query->add_option("--scenario", o.scenario, "scenario JSON file");
    query->add_option("--target", o.targets, "extra query target (repeatable)");
    query->add_flag("--json", o.json, "machine-readable output");

    auto* paper = app.add_subcommand("paper", "reproduce the three worked traffic scenarios");
    paper->add_option("--params", o.params, "traffic parameters JSON");
    paper->add_flag("--json", o.json, "machine-readable output");

    auto* validate = app.add_subcommand("validate", "structural and role-rule validation");
    add_net(validate);

    auto* sample = app.add_subcommand("sample", "seeded forward sampling");
    add_net(sample);
    sample->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
    sample->add_option("--n", o.n, "number of samples")->capture_default_str();
    sample->add_option("--out", o.out, "output path (default stdout)");

    auto* exp = app.add_subcommand("export", "write a network as JSON");
    add_net(exp);
    exp->add_option("--out", o.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    if (query->parsed()) return cmd_query(o, std::cout, std::cerr);
    if (paper->parsed()) return cmd_paper(o, std::cout, std::cerr);
    if (validate->parsed()) return cmd_validate(o, std::cout, std::cerr);
    if (sample->parsed()) return cmd_sample(o, std::cout, std::cerr);
    if (exp->parsed()) return cmd_export(o, std::cout, std::cerr);
    return kUsageError;
}

#include "offreach/error.hpp"
#include "offreach/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_state(const std::string& text)
{
    std::vector<double> x;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            x.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw offreach::Error(offreach::ErrorCode::ConfigError, "bad state component '" + item + "'");
        }
    }
    if (x.empty())
        throw offreach::Error(offreach::ErrorCode::ConfigError, "empty state");
    return x;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"offreach: sampled reach sets with inner and outer deviation margins"};
    app.require_subcommand(1);

    std::string config, out = "out", result, state;
    std::uint64_t seed = 0;
    std::vector<std::size_t> project;
    std::size_t n_eval_max = 32;

    for (const char* verb : {"nominal", "inner", "outer", "intervals", "table", "plot", "all"}) {
        auto* sub = app.add_subcommand(verb, std::string("run the scenario pipeline: ") + verb);
        sub->add_option("--config", config, "scenario JSON")->required();
        sub->add_option("--seed", seed, "override the sampler seed");
        sub->add_option("--out", out, "artifact directory");
        sub->add_option("--project", project, "two 1-based axes for plotting")->expected(2);
    }
    auto* ver = app.add_subcommand("verify", "query one state against a stored result");
    ver->add_option("--result", result, "evaluation-time directory holding nominal.rgs1 and meta.json")->required();
    ver->add_option("--state", state, "comma-separated state")->required();
    ver->add_option("--n-eval-max", n_eval_max, "sdf evaluation budget")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string verb = sub->get_name();
    try {
        if (verb == "verify") {
            const auto outcome = offreach::verify_result(result, parse_state(state), n_eval_max);
            std::cout << offreach::to_string(outcome.status) << " k=" << outcome.evaluations << "\n";
            return 0;
        }
        offreach::RunOptions opt;
        opt.verb = verb;
        opt.out = out;
        if (sub->count("--seed"))
            opt.seed = seed;
        if (!project.empty()) {
            if (project[0] < 1 || project[1] < 1)
                throw offreach::Error(offreach::ErrorCode::UnsupportedDim, "projection axes are 1-based");
            opt.project = std::make_pair(project[0] - 1, project[1] - 1);
        }
        offreach::run_scenario(offreach::load_config(config), opt, std::cerr);
        return 0;
    } catch (const std::exception& e) {
        const auto j = offreach::error_json(e);
        std::cerr << j.dump() << "\n";
        if (verb != "verify") {
            std::error_code ec;
            std::filesystem::create_directories(out, ec);
            std::ofstream f(std::filesystem::path(out) / "error.json");
            if (f)
                f << j.dump(2) << "\n";
        }
        return offreach::exit_code(e);
    }
}

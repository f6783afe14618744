#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace nss::cli;

struct Common {
    std::optional<fs::path> config;
    Overrides flags;
    std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.flags.seed, "Root seed");
    cmd->add_option("-o,--out", c.out, "Output directory")->capture_default_str();
}

void add_nss_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--bits", c.flags.bits, "TDQ bit width")->check(CLI::Range(1, 32));
    cmd->add_option("--neuron", c.flags.neuron, "Neuron model")
        ->check(CLI::IsMember({"tdq", "lif", "continuous"}));
}

void add_detector_flag(CLI::App* cmd, Common& c) {
    cmd->add_option("--detector", c.flags.detector, "Spike detector")->check(CLI::IsMember({"mad", "neo"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-layer sparse-coding spike sorter"};
    app.require_subcommand(1);

    Common gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic tetrode recording with ground truth");
    add_common(generate, gen);

    Common srt;
    SortOptions sort_opts;
    std::string model_path;
    auto* sort = app.add_subcommand("sort", "Detect, then train and label online with the network");
    add_common(sort, srt);
    add_nss_flags(sort, srt);
    add_detector_flag(sort, srt);
    sort->add_option("recording", sort_opts.recording, "Recording .bin (sidecar alongside)")->required();
    sort->add_option("--model", model_path, "Pretrained model checkpoint")->check(CLI::ExistingFile);
    sort->add_flag("--freeze", sort_opts.freeze, "Inference only; requires --model");

    Common evl;
    EvalOptions eval_opts;
    auto* eval = app.add_subcommand("eval", "Match sorted labels against ground truth");
    add_common(eval, evl);
    eval->add_option("labels", eval_opts.labels, "Labels CSV (time_s,label)")->required();
    eval->add_option("truth", eval_opts.truth, "Ground-truth CSV (unit_id,time_s)")->required();
    eval->add_option("--train-window-s", evl.flags.train_window_s, "Events before this time are not scored");

    Common bas;
    fs::path baseline_recording;
    auto* baseline = app.add_subcommand("baseline", "PCA + k-means reference sorter");
    add_common(baseline, bas);
    add_detector_flag(baseline, bas);
    baseline->add_option("recording", baseline_recording, "Recording .bin (sidecar alongside)")->required();
    baseline->add_option("--train-window-s", bas.flags.train_window_s, "Seconds used to fit PCA and centroids");

    Common swp;
    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "Full pipeline over bit widths and seeds");
    add_common(sweep, swp);
    add_detector_flag(sweep, swp);
    sweep->add_option("--bits", sweep_opts.bits, "Bit widths, comma separated")->delimiter(',')->capture_default_str();
    sweep->add_option("--seeds", sweep_opts.seeds, "Root seeds, comma separated")->delimiter(',')->capture_default_str();
    sweep->add_option("--neuron", swp.flags.neuron, "Neuron model")->check(CLI::IsMember({"tdq", "lif", "continuous"}));
    sweep->add_option("-j,--jobs", sweep_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            cmd_generate(load_config(gen.config, gen.flags), gen.out);
        } else if (sort->parsed()) {
            if (!model_path.empty()) sort_opts.model = model_path;
            sort_opts.out_dir = srt.out;
            cmd_sort(load_config(srt.config, srt.flags), sort_opts);
        } else if (eval->parsed()) {
            eval_opts.out_dir = evl.out;
            cmd_eval(load_config(evl.config, evl.flags), eval_opts);
        } else if (baseline->parsed()) {
            cmd_baseline(load_config(bas.config, bas.flags), baseline_recording, bas.out);
        } else if (sweep->parsed()) {
            sweep_opts.out_dir = swp.out;
            const auto cells = cmd_sweep(load_config(swp.config, swp.flags), sweep_opts);
            for (const auto& c : cells) {
                if (!c.ok) std::cerr << "warning: cell bits=" << c.bits << " seed=" << c.seed << " failed: " << c.error << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

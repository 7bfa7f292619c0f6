#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "grand/analysis.hpp"
#include "grand/channel.hpp"
#include "grand/codebook.hpp"
#include "grand/decoder.hpp"
#include "grand/gauss.hpp"
#include "grand/harness.hpp"
#include "grand/quantizer.hpp"
#include "grand/rates.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty SNR list");
    return out;
}

grand::LinearCode resolve_code(const std::string& name, const std::string& file) {
    if (!file.empty()) return grand::load_code_file(file);
    if (!name.empty()) return grand::builtin_code(name);
    throw std::invalid_argument("need --code or --code-file");
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open output file " + path);
    return file;
}

int cmd_design_quantizer(int q, double esn0_db, const std::string& flavor_s,
                         const std::string& out_path, const std::string& cache) {
    double sigma = std::pow(10.0, -esn0_db / 20.0);
    auto flavor = grand::quantizer_flavor_from_string(flavor_s);
    auto quant = grand::design_quantizer(flavor, sigma, q, cache);

    double mi = grand::rates::quantized_mi(sigma, quant);
    double lm_real =
        grand::rates::lm_rate(sigma, grand::rates::LmMetric::quantized(sigma, quant, false)).rate;
    double lm_int =
        grand::rates::lm_rate(sigma, grand::rates::LmMetric::quantized(sigma, quant, true)).rate;

    std::printf("# %s quantizer, q=%d (Q=%zu), designed at Es/N0 = %.4f dB (sigma = %.6f)\n",
                flavor_s.c_str(), q, quant.levels(), esn0_db, sigma);
    std::printf("# C_BPSK = %.4f\n", grand::rates::bpsk_capacity(sigma));
    std::printf("%-24s %-12s %s\n", "input range", "output", "integer weight");
    for (std::size_t i = 0; i < quant.levels(); ++i) {
        double lo = i == 0 ? 0.0 : quant.boundaries[i - 1];
        std::string hi = i + 1 == quant.levels() ? "+inf"
                                                 : (std::ostringstream{}
                                                    << std::fixed << quant.boundaries[i])
                                                       .str();
        char range[64];
        std::snprintf(range, sizeof(range), "[%.4f, %s)", lo, hi.c_str());
        std::printf("%-24s %-12.4f %u\n", range, quant.outputs[i] / quant.outputs[0],
                    quant.weights[i]);
    }
    std::printf("mutual information    = %.6f\n", mi);
    std::printf("LM-rate (real output) = %.6f\n", lm_real);
    std::printf("LM-rate (integer)     = %.6f\n", lm_int);
    if (quant.has_weight_collapse())
        std::fprintf(stderr, "warning: integer rounding merged adjacent levels\n");

    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw std::invalid_argument("cannot open output file " + out_path);
        grand::save_quantizer(quant, f);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guess-based universal decoding toolkit for binary linear block codes"};
    app.require_subcommand(1);

    // ---- design-quantizer
    auto* dq = app.add_subcommand("design-quantizer", "Design a reliability quantizer");
    int dq_q = 2;
    double dq_esn0 = 4.0;
    std::string dq_flavor = "nonuniform", dq_out, dq_cache;
    dq->add_option("--q", dq_q, "quantizer bits")->required();
    dq->add_option("--esn0-db", dq_esn0, "design Es/N0 in dB")->required();
    dq->add_option("--flavor", dq_flavor, "heuristic|uniform|nonuniform");
    dq->add_option("--out", dq_out, "write quantizer file");
    dq->add_option("--cache", dq_cache, "sidecar design cache path");

    // ---- simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo BLER / guess-count simulation");
    std::string sim_code, sim_code_file, sim_decoder = "orbgrand", sim_flavor = "nonuniform";
    std::string sim_ebn0 = "4", sim_out, sim_cache;
    int sim_q = 0;
    uint64_t sim_seed = 1, sim_min_errors = 300, sim_max_trials = 10'000'000, sim_budget = 0;
    int64_t sim_smax = -1;
    double sim_smax_tail = -1.0, sim_delta = 0.0;
    std::size_t sim_workers = 1, sim_fit_segments = 8;
    bool sim_all_zero = false;
    sim->add_option("--code", sim_code, "builtin code name, e.g. bch-31-16");
    sim->add_option("--code-file", sim_code_file, "code file path");
    sim->add_option("--decoder", sim_decoder, "hard|srgrand|orbgrand|sgrand|dsgrand|dsgrand-fitted");
    sim->add_option("--q", sim_q, "quantizer bits (dsgrand)");
    sim->add_option("--flavor", sim_flavor, "quantizer flavor (dsgrand)");
    sim->add_option("--ebn0-db", sim_ebn0, "comma-separated Eb/N0 list in dB");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--min-errors", sim_min_errors, "stop after this many block errors");
    sim->add_option("--max-trials", sim_max_trials, "trial cap per point");
    sim->add_option("--smax", sim_smax, "explicit DSGRAND score cap");
    sim->add_option("--smax-tail", sim_smax_tail, "target score-tail probability");
    sim->add_option("--budget", sim_budget, "max codebook queries per decode");
    sim->add_option("--out", sim_out, "CSV output path");
    sim->add_option("--workers", sim_workers, "worker threads");
    sim->add_flag("--all-zero", sim_all_zero, "transmit the all-zero codeword");
    sim->add_option("--delta", sim_delta, "SRGRAND reliability threshold");
    sim->add_option("--fit-segments", sim_fit_segments, "lambda segments (dsgrand-fitted)");
    sim->add_option("--cache", sim_cache, "quantizer design cache path");

    // ---- rates
    auto* rt = app.add_subcommand("rates", "Capacity / LM-rate / ORBGRAND-loss numerics");
    std::string rt_metric = "capacity", rt_esn0 = "4", rt_flavor = "nonuniform", rt_out;
    int rt_q = 2;
    std::size_t rt_n = 128;
    rt->add_option("--metric", rt_metric, "capacity|lm|orbgrand-loss");
    rt->add_option("--esn0-db", rt_esn0, "comma-separated Es/N0 list in dB");
    rt->add_option("--q", rt_q, "quantizer bits (lm)");
    rt->add_option("--flavor", rt_flavor, "quantizer flavor (lm)");
    rt->add_option("--n", rt_n, "block length (orbgrand-loss)");
    rt->add_option("--out", rt_out, "CSV output path");

    // ---- order-stats
    auto* os = app.add_subcommand("order-stats", "Order statistics of the reliabilities");
    double os_esn0 = 3.0;
    std::size_t os_n = 128;
    std::string os_out;
    os->add_option("--esn0-db", os_esn0, "Es/N0 in dB")->required();
    os->add_option("--n", os_n, "sample count")->required();
    os->add_option("--out", os_out, "CSV output path");

    // ---- smax
    auto* sm = app.add_subcommand("smax", "Score distribution of the true noise effect");
    std::size_t sm_n = 128, sm_k = 0;
    double sm_ebn0 = std::nan(""), sm_esn0 = std::nan(""), sm_tail = 1e-5;
    int sm_q = 3;
    std::string sm_flavor = "heuristic", sm_out, sm_cache;
    sm->add_option("--n", sm_n, "block length")->required();
    sm->add_option("--k", sm_k, "dimension (for Eb/N0 conversion)");
    sm->add_option("--ebn0-db", sm_ebn0, "Eb/N0 in dB (needs --k)");
    sm->add_option("--esn0-db", sm_esn0, "Es/N0 in dB");
    sm->add_option("--q", sm_q, "quantizer bits; 0 for the continuous score");
    sm->add_option("--flavor", sm_flavor, "quantizer flavor");
    sm->add_option("--smax-tail", sm_tail, "target tail probability");
    sm->add_option("--out", sm_out, "CSV output path");
    sm->add_option("--cache", sm_cache, "quantizer design cache path");

    // ---- code
    auto* cd = app.add_subcommand("code", "Build, inspect and save codes");
    std::string cd_code, cd_code_file, cd_out;
    cd->add_option("--code", cd_code, "builtin code name");
    cd->add_option("--code-file", cd_code_file, "code file to load");
    cd->add_option("--out", cd_out, "save code to file");

    try {
        app.parse(argc, argv);

        if (dq->parsed()) return cmd_design_quantizer(dq_q, dq_esn0, dq_flavor, dq_out, dq_cache);

        if (sim->parsed()) {
            grand::SimConfig config(resolve_code(sim_code, sim_code_file));
            config.decoder = grand::decoder_kind_from_string(sim_decoder);
            config.q = sim_q;
            config.flavor = grand::quantizer_flavor_from_string(sim_flavor);
            config.ebn0_db = parse_list(sim_ebn0);
            config.seed = sim_seed;
            config.min_errors = sim_min_errors;
            config.max_trials = sim_max_trials;
            if (sim_smax >= 0) config.smax = static_cast<uint64_t>(sim_smax);
            if (sim_smax_tail > 0) config.smax_tail = sim_smax_tail;
            if (sim_delta > 0) config.srgrand_delta = sim_delta;
            config.budget = sim_budget;
            config.workers = sim_workers;
            config.all_zero = sim_all_zero;
            config.fit_segments = sim_fit_segments;
            config.quantizer_cache = sim_cache;
            std::ofstream file;
            std::ostream& out = open_out(file, sim_out);
            grand::run_sweep(config, &out);
            return 0;
        }

        if (rt->parsed()) {
            std::ofstream file;
            std::ostream& out = open_out(file, rt_out);
            auto snrs = parse_list(rt_esn0);
            if (rt_metric == "capacity") {
                out << "esn0_db,capacity\n";
                for (double es : snrs) {
                    double sigma = std::pow(10.0, -es / 20.0);
                    out << es << "," << grand::rates::bpsk_capacity(sigma) << "\n";
                }
            } else if (rt_metric == "lm") {
                auto flavor = grand::quantizer_flavor_from_string(rt_flavor);
                out << "esn0_db,mi,lm_real,lm_integer\n";
                for (double es : snrs) {
                    double sigma = std::pow(10.0, -es / 20.0);
                    auto quant = grand::design_quantizer(flavor, sigma, rt_q);
                    using grand::rates::LmMetric;
                    out << es << "," << grand::rates::quantized_mi(sigma, quant) << ","
                        << grand::rates::lm_rate(sigma, LmMetric::quantized(sigma, quant, false)).rate
                        << ","
                        << grand::rates::lm_rate(sigma, LmMetric::quantized(sigma, quant, true)).rate
                        << "\n";
                }
            } else if (rt_metric == "orbgrand-loss") {
                out << "esn0_db,loss_db\n";
                for (double es : snrs) {
                    double sigma = std::pow(10.0, -es / 20.0);
                    out << es << "," << grand::rates::orbgrand_loss(sigma, rt_n) << "\n";
                }
            } else {
                throw std::invalid_argument("unknown metric " + rt_metric);
            }
            return 0;
        }

        if (os->parsed()) {
            double sigma = std::pow(10.0, -os_esn0 / 20.0);
            auto curve = grand::analysis::order_stat_moments(
                grand::analysis::FoldedGaussianSpec::from_sigma(sigma), os_n, true);
            std::ofstream file;
            std::ostream& out = open_out(file, os_out);
            grand::analysis::write_order_stat_csv(out, curve);
            return 0;
        }

        if (sm->parsed()) {
            double esn0;
            if (!std::isnan(sm_esn0)) {
                esn0 = sm_esn0;
            } else if (!std::isnan(sm_ebn0)) {
                if (sm_k == 0) throw std::invalid_argument("smax: --ebn0-db needs --k");
                esn0 = grand::ChannelParams::from_ebn0_db(sm_ebn0, sm_n, sm_k).es_n0_db;
            } else {
                throw std::invalid_argument("smax: need --esn0-db or --ebn0-db");
            }
            double sigma = std::pow(10.0, -esn0 / 20.0);
            grand::analysis::ScoreDistribution dist;
            if (sm_q > 0) {
                auto quant = grand::design_quantizer(
                    grand::quantizer_flavor_from_string(sm_flavor), sigma, sm_q, sm_cache);
                dist = grand::analysis::true_score_distribution(sigma, sm_n, &quant);
            } else {
                dist = grand::analysis::true_score_distribution(sigma, sm_n, nullptr);
            }
            double smax = grand::analysis::select_smax(dist, sm_tail);
            std::printf("s_max = %g  (target tail %.3g at Es/N0 = %.4f dB, mean score %.4f)\n",
                        smax, sm_tail, esn0, dist.mean());
            if (!sm_out.empty()) {
                std::ofstream f(sm_out);
                if (!f) throw std::invalid_argument("cannot open " + sm_out);
                grand::analysis::write_score_csv(f, dist);
            }
            return 0;
        }

        if (cd->parsed()) {
            auto code = resolve_code(cd_code, cd_code_file);
            std::printf("%s: n=%zu k=%zu rate=%.4f H=%zux%zu G=%s\n", code.name().c_str(),
                        code.n(), code.k(), double(code.k()) / double(code.n()),
                        code.H().rows(), code.H().cols(), code.G() ? "yes" : "no");
            if (!cd_out.empty()) grand::save_code_file(code, cd_out);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const grand::NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s (best value %g)\n", e.what(), e.best_value);
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

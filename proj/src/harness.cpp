#include "grand/harness.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "grand/analysis.hpp"
#include "grand/channel.hpp"

namespace grand {

namespace {

constexpr std::size_t kBatch = 4096;  // fixed so stop decisions ignore worker count

struct TrialOutcome {
    uint8_t error = 0, undetected = 0, abandoned = 0;
    uint8_t found = 0;
    uint64_t n_p = 0;
    double score = 0.0;
    uint64_t max_stack = 0;
};

uint64_t point_key(double ebn0_db) { return std::bit_cast<uint64_t>(ebn0_db); }

Decoder build_decoder(const SimConfig& config, const ChannelParams& params) {
    const std::size_t n = config.code.n();
    DecoderConfig dc;
    dc.kind = config.decoder;
    dc.budget = config.budget;
    dc.sigma = params.sigma;
    dc.srgrand_delta = config.srgrand_delta;

    if (config.decoder == DecoderKind::dsgrand) {
        if (config.q < 1) throw std::invalid_argument("simulate: dsgrand needs --q >= 1");
        ReliabilityQuantizer quant =
            design_quantizer(config.flavor, params.sigma, config.q, config.quantizer_cache);
        if (config.smax) {
            dc.smax = *config.smax;
        } else {
            double tail = config.smax_tail.value_or(1e-5);
            auto dist = analysis::true_score_distribution(params.sigma, n, &quant);
            dc.smax = static_cast<uint64_t>(analysis::select_smax(dist, tail));
        }
        dc.quantizer = std::move(quant);
    } else if (config.decoder == DecoderKind::dsgrand_fitted) {
        auto spec = analysis::FoldedGaussianSpec::from_sigma(params.sigma);
        auto curve = analysis::order_stat_moments(spec, n, false);
        auto fit = analysis::fit_lambda(curve, std::min(config.fit_segments, n - 1));
        std::vector<double> lam(n);
        for (std::size_t r = 0; r < n; ++r) lam[r] = fit.eval(static_cast<double>(r + 1));
        dc.fitted_weights = integer_weights(lam);
        uint64_t wsum = 0;
        for (uint32_t w : dc.fitted_weights) wsum += w;
        dc.smax = config.smax.value_or(wsum);
    } else if (config.smax) {
        dc.smax = config.smax;
    }
    return Decoder(config.code, dc);
}

}  // namespace

SimRecord run_point(const SimConfig& config, double ebn0_db) {
    if (config.min_errors < 1) throw std::invalid_argument("simulate: min_errors must be >= 1");
    if (config.max_trials < 10) throw std::invalid_argument("simulate: max_trials must be >= 10");
    if (!config.all_zero && !config.code.G())
        throw std::invalid_argument("simulate: code has no generator matrix, cannot encode");

    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = config.code.n(), k = config.code.k();
    const ChannelParams params = ChannelParams::from_ebn0_db(ebn0_db, n, k);
    const Decoder decoder = build_decoder(config, params);
    const uint64_t pkey = point_key(ebn0_db);
    const std::size_t workers = std::max<std::size_t>(1, config.workers);

    SimRecord rec;
    rec.ebn0_db = ebn0_db;
    uint64_t np_sum = 0, found = 0;
    double score_sum = 0.0;

    std::vector<TrialOutcome> slots(kBatch);
    uint64_t trial_base = 0;
    while (rec.errors < config.min_errors && trial_base < config.max_trials) {
        const std::size_t batch =
            static_cast<std::size_t>(std::min<uint64_t>(kBatch, config.max_trials - trial_base));
        auto run_range = [&](std::size_t lo, std::size_t hi) {
            BitVec msg(k);
            for (std::size_t t = lo; t < hi; ++t) {
                const uint64_t trial = trial_base + t;
                rng::Stream stream = rng::Stream::for_trial(config.seed, pkey, trial);
                BitVec cw(n);
                if (!config.all_zero) {
                    for (std::size_t i = 0; i < k; ++i) msg.assign_bit(i, stream.next_bit());
                    cw = config.code.encode(msg);
                }
                Observation obs = transmit(cw, params, stream);
                DecodeResult res = decoder.decode(obs);
                TrialOutcome& out = slots[t];
                out = TrialOutcome{};
                out.n_p = res.n_p;
                out.max_stack = res.ops.max_stack;
                if (res.state == DecodeState::found) {
                    out.found = 1;
                    out.score = res.score;
                    if (!(*res.codeword == cw)) {
                        out.error = 1;
                        out.undetected = 1;
                    }
                } else {
                    out.error = 1;
                    out.abandoned = 1;
                }
            }
        };
        if (workers == 1 || batch < 2 * workers) {
            run_range(0, batch);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (batch + workers - 1) / workers;
            for (std::size_t w = 0; w < workers; ++w) {
                std::size_t lo = w * chunk, hi = std::min(batch, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(run_range, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
        // Merge in trial order; the stop rule then never depends on scheduling.
        for (std::size_t t = 0; t < batch; ++t) {
            const TrialOutcome& out = slots[t];
            rec.trials++;
            rec.errors += out.error;
            rec.undetected += out.undetected;
            rec.abandoned += out.abandoned;
            np_sum += out.n_p;
            if (out.found) {
                found++;
                score_sum += out.score;
            }
            if (out.max_stack > rec.max_stack) rec.max_stack = out.max_stack;
        }
        // The whole batch always counts; the stop rule is checked only at batch
        // boundaries so it cannot depend on scheduling.
        trial_base += batch;
    }

    rec.bler = rec.trials ? static_cast<double>(rec.errors) / static_cast<double>(rec.trials) : 0.0;
    rec.ubler =
        rec.trials ? static_cast<double>(rec.undetected) / static_cast<double>(rec.trials) : 0.0;
    rec.mean_np = rec.trials ? static_cast<double>(np_sum) / static_cast<double>(rec.trials) : 0.0;
    rec.mean_score = found ? score_sum / static_cast<double>(found) : 0.0;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<SimRecord> run_sweep(const SimConfig& config, std::ostream* csv) {
    if (config.ebn0_db.empty()) throw std::invalid_argument("simulate: empty SNR list");
    if (csv) write_csv_header(*csv);
    std::vector<SimRecord> records;
    for (double snr : config.ebn0_db) {
        records.push_back(run_point(config, snr));
        if (csv) write_csv_row(*csv, records.back());
    }
    return records;
}

void write_csv_header(std::ostream& out) {
    out << "ebn0_db,trials,errors,undetected,abandoned,bler,ubler,mean_np,mean_score,max_stack,"
           "seconds\n";
}

void write_csv_row(std::ostream& out, const SimRecord& rec) {
    char buf[384];
    std::snprintf(buf, sizeof(buf), "%.9g,%llu,%llu,%llu,%llu,%.9g,%.9g,%.9g,%.9g,%llu,%.9g\n",
                  rec.ebn0_db, static_cast<unsigned long long>(rec.trials),
                  static_cast<unsigned long long>(rec.errors),
                  static_cast<unsigned long long>(rec.undetected),
                  static_cast<unsigned long long>(rec.abandoned), rec.bler, rec.ubler, rec.mean_np,
                  rec.mean_score, static_cast<unsigned long long>(rec.max_stack), rec.seconds);
    out << buf;
}

}  // namespace grand

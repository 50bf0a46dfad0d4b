// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

namespace aggcorrect {

namespace {

constexpr std::uint64_t kChunkSize = 1024;
constexpr std::uint64_t kSamplerStreamTag = 0x73616d706c657221ULL;

struct ChunkResult {
  // (attempt offset within the chunk, draw)
  std::vector<std::pair<std::uint32_t, ParameterDraw>> accepted;
  std::uint64_t attempts = 0;
};

ChunkResult run_chunk(const PosteriorSpec& spec,
                      const std::optional<ConstraintRegion>& region,
                      const SamplerConfig& cfg, std::uint64_t chunk_index) {
  const std::uint64_t start = chunk_index * kChunkSize;
  ChunkResult out;
  out.attempts = std::min(kChunkSize, cfg.max_total_attempts - start);
  RngStream rng(derive_seed(cfg.seed, {kSamplerStreamTag, chunk_index}));
  for (std::uint32_t i = 0; i < out.attempts; ++i) {
    ParameterDraw draw = sample_posterior_product(spec, rng);
    const bool admissible =
        region ? contains(*region, draw.p)
               : try_invert_transpose(draw.p).has_value();
    if (admissible) {
      out.accepted.emplace_back(i, std::move(draw));
    }
  }
  return out;
}

}  // namespace

SamplerConfig SamplerConfig::with_attempts_factor(std::uint64_t resolution,
                                                  std::uint64_t factor,
                                                  std::uint64_t seed,
                                                  unsigned workers) {
  SamplerConfig cfg;
  cfg.resolution = resolution;
  cfg.max_total_attempts = resolution * factor;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.validate();
  return cfg;
}

void SamplerConfig::validate() const {
  if (resolution < 1) {
    fail(ErrorKind::InvalidArgument, "resolution must be >= 1");
  }
  if (max_total_attempts < resolution) {
    fail(ErrorKind::InvalidArgument,
         "max_total_attempts must be >= resolution");
  }
  if (workers < 1) {
    fail(ErrorKind::InvalidArgument, "workers must be >= 1");
  }
}

Vector sample_dirichlet(const Vector& concentrations, RngStream& rng) {
  if (concentrations.size() < 1) {
    fail(ErrorKind::InvalidArgument, "concentration vector must be non-empty");
  }
  if (!((concentrations.array() > 0.0).all() && concentrations.allFinite())) {
    fail(ErrorKind::NonPositiveConcentration,
         "all concentrations must be strictly positive");
  }
  return rng.dirichlet(concentrations);
}

ParameterDraw sample_posterior_product(const PosteriorSpec& spec,
                                       RngStream& rng) {
  const DirichletProduct& post = spec.posterior();
  const int k = post.k();
  Matrix rows(k, k);
  for (int g = 0; g < k; ++g) {
    rows.row(g) = rng.dirichlet(post.alpha().row(g).transpose()).transpose();
  }
  Vector beta = rng.dirichlet(post.gamma());
  return ParameterDraw{ContingencyMatrix::validated(std::move(rows)),
                       std::move(beta)};
}

PosteriorDraws rejection_sample(const PosteriorSpec& spec,
                                const std::optional<ConstraintRegion>& region,
                                const SamplerConfig& cfg) {
  cfg.validate();
  if (region && region->k() != spec.k()) {
    fail(ErrorKind::DimensionMismatch, "region dimension must match posterior");
  }

  const std::uint64_t total_chunks =
      (cfg.max_total_attempts + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkResult> results;
  std::uint64_t next_chunk = 0;
  std::uint64_t accepted_total = 0;
  std::uint64_t attempted_total = 0;

  while (accepted_total < cfg.resolution && next_chunk < total_chunks) {
    // Schedule a wave sized from the acceptance rate seen so far.
    std::uint64_t wave = cfg.workers;
    if (attempted_total > 0 && accepted_total > 0) {
      const double rate = static_cast<double>(accepted_total) /
                          static_cast<double>(attempted_total);
      const double remaining =
          static_cast<double>(cfg.resolution - accepted_total);
      const double chunks_needed =
          1.1 * remaining / (rate * static_cast<double>(kChunkSize));
      wave = std::max<std::uint64_t>(
          cfg.workers, static_cast<std::uint64_t>(std::ceil(chunks_needed)));
    }
    wave = std::min(wave, total_chunks - next_chunk);

    const std::size_t base = results.size();
    results.resize(base + wave);
    const unsigned threads =
        static_cast<unsigned>(std::min<std::uint64_t>(cfg.workers, wave));
    if (threads <= 1) {
      for (std::uint64_t w = 0; w < wave; ++w) {
        results[base + w] = run_chunk(spec, region, cfg, next_chunk + w);
      }
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr first_error;
      std::mutex error_mutex;
      pool.reserve(threads);
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
          try {
            for (std::uint64_t w = t; w < wave; w += threads) {
              results[base + w] = run_chunk(spec, region, cfg, next_chunk + w);
            }
          } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) {
              first_error = std::current_exception();
            }
          }
        });
      }
      for (auto& th : pool) {
        th.join();
      }
      if (first_error) {
        std::rethrow_exception(first_error);
      }
    }
    next_chunk += wave;
    for (std::size_t i = base; i < results.size(); ++i) {
      accepted_total += results[i].accepted.size();
      attempted_total += results[i].attempts;
    }
  }

  if (accepted_total < cfg.resolution) {
    const double rate = attempted_total == 0
                            ? 0.0
                            : static_cast<double>(accepted_total) /
                                  static_cast<double>(attempted_total);
    std::ostringstream msg;
    msg << "only " << accepted_total << " of " << cfg.resolution
        << " draws accepted within " << attempted_total
        << " attempts (acceptance rate " << rate << ")";
    fail(ErrorKind::ConstraintStarvation, msg.str());
  }

  // Merge in chunk order; attempts are counted up to the R-th acceptance.
  PosteriorDraws out;
  out.draws.reserve(cfg.resolution);
  for (std::size_t c = 0; c < results.size() && out.accepted < cfg.resolution;
       ++c) {
    for (auto& [offset, draw] : results[c].accepted) {
      out.draws.push_back(std::move(draw));
      ++out.accepted;
      if (out.accepted == cfg.resolution) {
        out.attempted = c * kChunkSize + offset + 1;
        break;
      }
    }
  }
  out.acceptance_rate = static_cast<double>(out.accepted) /
                        static_cast<double>(out.attempted);
  return out;
}

}  // namespace aggcorrect

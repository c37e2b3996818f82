#pragma once

// JSON documents for models and data. Matrices are row-major nested arrays,
// covariances are {"kind": "dense" | "factor", "matrix": [[...], ...]}.
//
//   {
//     "state_dim": D, "obs_dim": d,
//     "initial": {"mean": [...], "cov": {...}},
//     "steps": [{"A": ..., "trans_bias_mean": ..., "B": {...},
//                "H": ..., "obs_bias_mean": ..., "R": {...}}, ...],
//     "observations": [[...], ...]          (optional)
//   }

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "fixpoint/linear_ssm.hpp"

namespace fixpoint {

nlohmann::json to_json(const Lgssm<double>& model,
                       const Observations<double>* observations = nullptr);

Lgssm<double> model_from_json(const nlohmann::json& doc);

/// Empty when the document carries no "observations" key.
std::optional<Observations<double>> observations_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const Lgssm<double>& model,
                const Observations<double>* observations = nullptr);

nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace fixpoint

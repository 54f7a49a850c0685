// Windowed cross-attention temporal module: 2x2 window partition,
// context mean, per-window MHCA, residual enrichment, attention pooling,
// projection, cross-entropy loss, and a finite-difference grad checker.
//
// Copyright 2026 the vpoint authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace vpoint {

/// Dense row-major tensor of doubles with an explicit shape.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> v;

    static Tensor zeros(std::vector<std::size_t> shape);
    std::size_t size() const { return v.size(); }

    double& at3(std::size_t i, std::size_t j, std::size_t k) {
        return v[(i * shape[1] + j) * shape[2] + k];
    }
    double at3(std::size_t i, std::size_t j, std::size_t k) const {
        return v[(i * shape[1] + j) * shape[2] + k];
    }
    double& at2(std::size_t i, std::size_t j) { return v[i * shape[1] + j]; }
    double at2(std::size_t i, std::size_t j) const { return v[i * shape[1] + j]; }

    bool operator==(const Tensor&) const = default;
};

/// [N, P, D] -> [N*P/4, 4, D]. Patches form an S x S grid (S = sqrt(P),
/// even); window w = (r/2)*(S/2) + (c/2) within each crop, slot order
/// [(2r,2c), (2r,2c+1), (2r+1,2c), (2r+1,2c+1)], crops concatenated.
Tensor window_partition(const Tensor& f);

/// Exact inverse of window_partition for the given crop count.
Tensor window_unpartition(const Tensor& windows, std::size_t crops);

/// Holds the window tensors of the l most recent frames.
class ContextBuffer {
public:
    explicit ContextBuffer(std::size_t capacity);
    void push(Tensor frame_windows);
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::deque<Tensor>& entries() const { return entries_; }

private:
    std::size_t capacity_;
    std::deque<Tensor> entries_;
};

inline constexpr std::size_t kDefaultContextLength = 4;

/// Element-wise mean over the stored frames. Throws on an empty buffer.
Tensor context_mean(const ContextBuffer& buf);

struct MhcaParams {
    std::size_t dim = 0;    // D, divisible by heads
    std::size_t heads = 0;  // h
    // D x D row-major (y = x W + b), heads packed along the output axis
    std::vector<double> wq, wk, wv, wo;
    std::vector<double> bq, bk, bv, bo;  // length D
};

struct PoolParams {
    std::vector<double> query;  // length D
};

struct ProjParams {
    std::size_t in_dim = 0, out_dim = 0;
    std::vector<double> w;  // in_dim x out_dim row-major
    std::vector<double> b;  // out_dim
};

/// Per-window multi-head cross-attention: queries from fq, keys/values
/// from fkv, scaled dot-product over the 4 slots, heads concatenated and
/// output-projected. No cross-window attention.
Tensor mhca(const Tensor& fq, const Tensor& fkv, const MhcaParams& params);

/// Attention weights [W, heads, 4 query slots, 4 key slots].
std::vector<double> mhca_attention(const Tensor& fq, const Tensor& fkv,
                                   const MhcaParams& params);

/// Residual enrichment: f + mhca(f, fctx).
Tensor temporal_enrich(const Tensor& f, const Tensor& fctx, const MhcaParams& params);

/// [W, 4, D] -> [W, D]: a learned query attends over the 4 slots; the
/// output is the softmax-weighted slot mean.
Tensor attn_pool(const Tensor& windows, const PoolParams& params);

/// Pooling weights [W, 4]; each row sums to 1.
std::vector<double> attn_pool_weights(const Tensor& windows, const PoolParams& params);

/// Affine map per token: [W, D] -> [W, out_dim].
Tensor project(const Tensor& tokens, const ProjParams& params);

/// -log softmax(logits)[target], max-subtracted for stability.
double cross_entropy(const std::vector<double>& logits, std::size_t target);

struct PipelineParams {
    MhcaParams mhca;
    PoolParams pool;
    ProjParams proj;
};

/// Xavier-style symmetric uniform init; the output projection starts at
/// zero when zero_output_proj is set (residual identity cold start).
PipelineParams init_pipeline_params(std::size_t dim, std::size_t heads, std::size_t out_dim,
                                    std::uint64_t seed, bool zero_output_proj = false);

/// Scalar loss of the full chain: enrich -> pool -> project -> token mean
/// -> cross-entropy against the target class.
double pipeline_loss(const Tensor& f, const Tensor& fctx, const PipelineParams& params,
                     std::size_t target);

/// Flat parameter vector in a fixed order (wq, bq, wk, bk, wv, bv, wo,
/// bo, pool query, proj w, proj b); unflatten is the exact inverse.
std::vector<double> flatten_params(const PipelineParams& params);
void unflatten_params(const std::vector<double>& flat, PipelineParams& params);
std::vector<std::string> param_names(const PipelineParams& params);

/// Analytic gradient of pipeline_loss w.r.t. every parameter, in
/// flatten_params order.
std::vector<double> analytic_gradients(const Tensor& f, const Tensor& fctx,
                                       const PipelineParams& params, std::size_t target);

/// Central finite differences (f(t+h) - f(t-h)) / 2h per parameter.
std::vector<double> numeric_gradients(const Tensor& f, const Tensor& fctx,
                                      const PipelineParams& params, std::size_t target,
                                      double h);

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t worst_index = 0;
    std::string worst_name;
};

/// Max relative error between the two gradient routes; the denominator is
/// max(|analytic|, |numeric|, 1e-6).
GradCheckResult grad_check(const Tensor& f, const Tensor& fctx, const PipelineParams& params,
                           std::size_t target, double h);

/// Relative-error comparison used by grad_check, exposed for negative
/// controls (e.g. deliberately scaled gradients must be flagged).
GradCheckResult compare_gradients(const std::vector<double>& analytic,
                                  const std::vector<double>& numeric,
                                  const std::vector<std::string>& names);

/// Named-tensor snapshot: magic "VPTP", version 0x01, little-endian
/// u32 entry count, then per entry u32 name length, name bytes, u64
/// element count, f64 data.
void save_params(const PipelineParams& params, const std::string& path);
PipelineParams load_params(const std::string& path);

}  // namespace vpoint

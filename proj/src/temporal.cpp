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

#include "vpoint/temporal.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "vpoint/rng.hpp"

namespace vpoint {

namespace {

constexpr std::size_t kSlots = 4;  // 2x2 window

void require_finite(const Tensor& t, const char* what) {
    for (double x : t.v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

void require_windows(const Tensor& t, const char* what) {
    if (t.shape.size() != 3 || t.shape[1] != kSlots)
        throw std::invalid_argument(std::string(what) + ": expected [W, 4, D] tensor");
}

void softmax4(const double* logits, double* out) {
    double m = logits[0];
    for (std::size_t i = 1; i < kSlots; ++i) m = std::max(m, logits[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < kSlots; ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (std::size_t i = 0; i < kSlots; ++i) out[i] /= sum;
}

// y (4 x D) = x (4 x D) * w (D x D) + b
void affine4(const double* x, const std::vector<double>& w, const std::vector<double>& b,
             std::size_t dim, double* y) {
    for (std::size_t r = 0; r < kSlots; ++r) {
        for (std::size_t j = 0; j < dim; ++j) {
            double acc = b[j];
            for (std::size_t i = 0; i < dim; ++i) acc += x[r * dim + i] * w[i * dim + j];
            y[r * dim + j] = acc;
        }
    }
}

// Forward cache for one window of the full chain.
struct WindowCache {
    std::vector<double> q, k, v;     // 4 x D
    std::vector<double> attn;        // heads x 4 x 4
    std::vector<double> concat;      // 4 x D, heads concatenated
    std::vector<double> enriched;    // 4 x D, residual added
    double pool_w[kSlots];           // pooling weights
    std::vector<double> token;       // D
};

WindowCache window_forward(const double* xq, const double* xc, const MhcaParams& mp,
                           const PoolParams& pp) {
    const std::size_t dim = mp.dim;
    const std::size_t heads = mp.heads;
    const std::size_t hd = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

    WindowCache c;
    c.q.resize(kSlots * dim);
    c.k.resize(kSlots * dim);
    c.v.resize(kSlots * dim);
    affine4(xq, mp.wq, mp.bq, dim, c.q.data());
    affine4(xc, mp.wk, mp.bk, dim, c.k.data());
    affine4(xc, mp.wv, mp.bv, dim, c.v.data());

    c.attn.resize(heads * kSlots * kSlots);
    c.concat.assign(kSlots * dim, 0.0);
    for (std::size_t t = 0; t < heads; ++t) {
        const std::size_t off = t * hd;
        for (std::size_t r = 0; r < kSlots; ++r) {
            double logits[kSlots];
            for (std::size_t col = 0; col < kSlots; ++col) {
                double acc = 0.0;
                for (std::size_t d = 0; d < hd; ++d)
                    acc += c.q[r * dim + off + d] * c.k[col * dim + off + d];
                logits[col] = acc * scale;
            }
            double* p = &c.attn[(t * kSlots + r) * kSlots];
            softmax4(logits, p);
            for (std::size_t col = 0; col < kSlots; ++col)
                for (std::size_t d = 0; d < hd; ++d)
                    c.concat[r * dim + off + d] += p[col] * c.v[col * dim + off + d];
        }
    }

    c.enriched.resize(kSlots * dim);
    affine4(c.concat.data(), mp.wo, mp.bo, dim, c.enriched.data());
    for (std::size_t i = 0; i < kSlots * dim; ++i) c.enriched[i] += xq[i];

    const double pool_scale = 1.0 / std::sqrt(static_cast<double>(dim));
    double logits[kSlots];
    for (std::size_t s = 0; s < kSlots; ++s) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) acc += pp.query[d] * c.enriched[s * dim + d];
        logits[s] = acc * pool_scale;
    }
    softmax4(logits, c.pool_w);
    c.token.assign(dim, 0.0);
    for (std::size_t s = 0; s < kSlots; ++s)
        for (std::size_t d = 0; d < dim; ++d) c.token[d] += c.pool_w[s] * c.enriched[s * dim + d];
    return c;
}

void require_mhca_shapes(const Tensor& fq, const Tensor& fkv, const MhcaParams& p) {
    require_windows(fq, "mhca");
    require_windows(fkv, "mhca");
    if (fq.shape != fkv.shape) throw std::invalid_argument("mhca: query/context shape mismatch");
    if (p.dim == 0 || p.heads == 0 || p.dim % p.heads != 0)
        throw std::invalid_argument("mhca: dim must be a positive multiple of heads");
    if (fq.shape[2] != p.dim) throw std::invalid_argument("mhca: channel dim mismatch");
    const std::size_t dd = p.dim * p.dim;
    if (p.wq.size() != dd || p.wk.size() != dd || p.wv.size() != dd || p.wo.size() != dd ||
        p.bq.size() != p.dim || p.bk.size() != p.dim || p.bv.size() != p.dim ||
        p.bo.size() != p.dim)
        throw std::invalid_argument("mhca: parameter sizes inconsistent with dim");
    require_finite(fq, "mhca");
    require_finite(fkv, "mhca");
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    Tensor t;
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    t.shape = std::move(shape);
    t.v.assign(n, 0.0);
    return t;
}

Tensor window_partition(const Tensor& f) {
    if (f.shape.size() != 3) throw std::invalid_argument("window_partition: expected [N, P, D]");
    const std::size_t n = f.shape[0], p = f.shape[1], d = f.shape[2];
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p))));
    if (side * side != p || side % 2 != 0)
        throw std::invalid_argument("window_partition: P must be a perfect square with even side");

    const std::size_t per_crop = p / 4;
    Tensor out = Tensor::zeros({n * per_crop, kSlots, d});
    for (std::size_t crop = 0; crop < n; ++crop) {
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t col = 0; col < side; ++col) {
                const std::size_t w = (r / 2) * (side / 2) + (col / 2);
                const std::size_t slot = (r % 2) * 2 + (col % 2);
                const std::size_t src = (crop * p + r * side + col) * d;
                const std::size_t dst = ((crop * per_crop + w) * kSlots + slot) * d;
                std::memcpy(&out.v[dst], &f.v[src], d * sizeof(double));
            }
        }
    }
    return out;
}

Tensor window_unpartition(const Tensor& windows, std::size_t crops) {
    require_windows(windows, "window_unpartition");
    if (crops == 0 || windows.shape[0] % crops != 0)
        throw std::invalid_argument("window_unpartition: window count not divisible by crops");
    const std::size_t per_crop = windows.shape[0] / crops;
    const std::size_t p = per_crop * 4;
    const std::size_t d = windows.shape[2];
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p))));
    if (side * side != p)
        throw std::invalid_argument("window_unpartition: window count is not a crop grid");

    Tensor out = Tensor::zeros({crops, p, d});
    for (std::size_t crop = 0; crop < crops; ++crop) {
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t col = 0; col < side; ++col) {
                const std::size_t w = (r / 2) * (side / 2) + (col / 2);
                const std::size_t slot = (r % 2) * 2 + (col % 2);
                const std::size_t dst = (crop * p + r * side + col) * d;
                const std::size_t src = ((crop * per_crop + w) * kSlots + slot) * d;
                std::memcpy(&out.v[dst], &windows.v[src], d * sizeof(double));
            }
        }
    }
    return out;
}

ContextBuffer::ContextBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ContextBuffer: capacity must be >= 1");
}

void ContextBuffer::push(Tensor frame_windows) {
    if (!entries_.empty() && entries_.front().shape != frame_windows.shape)
        throw std::invalid_argument("ContextBuffer: shape mismatch");
    entries_.push_back(std::move(frame_windows));
    if (entries_.size() > capacity_) entries_.pop_front();
}

Tensor context_mean(const ContextBuffer& buf) {
    if (buf.size() == 0) throw std::invalid_argument("context_mean: empty buffer");
    Tensor out = Tensor::zeros(buf.entries().front().shape);
    for (const Tensor& t : buf.entries())
        for (std::size_t i = 0; i < out.size(); ++i) out.v[i] += t.v[i];
    const double inv = 1.0 / static_cast<double>(buf.size());
    for (double& x : out.v) x *= inv;
    return out;
}

Tensor mhca(const Tensor& fq, const Tensor& fkv, const MhcaParams& params) {
    require_mhca_shapes(fq, fkv, params);
    const std::size_t windows = fq.shape[0], dim = params.dim;
    Tensor out = Tensor::zeros(fq.shape);
    PoolParams dummy_pool{std::vector<double>(dim, 0.0)};
    for (std::size_t w = 0; w < windows; ++w) {
        const WindowCache c =
            window_forward(&fq.v[w * kSlots * dim], &fkv.v[w * kSlots * dim], params, dummy_pool);
        for (std::size_t i = 0; i < kSlots * dim; ++i)
            out.v[w * kSlots * dim + i] = c.enriched[i] - fq.v[w * kSlots * dim + i];
    }
    return out;
}

std::vector<double> mhca_attention(const Tensor& fq, const Tensor& fkv,
                                   const MhcaParams& params) {
    require_mhca_shapes(fq, fkv, params);
    const std::size_t windows = fq.shape[0], dim = params.dim;
    PoolParams dummy_pool{std::vector<double>(dim, 0.0)};
    std::vector<double> out;
    out.reserve(windows * params.heads * kSlots * kSlots);
    for (std::size_t w = 0; w < windows; ++w) {
        const WindowCache c =
            window_forward(&fq.v[w * kSlots * dim], &fkv.v[w * kSlots * dim], params, dummy_pool);
        out.insert(out.end(), c.attn.begin(), c.attn.end());
    }
    return out;
}

Tensor temporal_enrich(const Tensor& f, const Tensor& fctx, const MhcaParams& params) {
    Tensor out = mhca(f, fctx, params);
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] += f.v[i];
    return out;
}

Tensor attn_pool(const Tensor& windows, const PoolParams& params) {
    require_windows(windows, "attn_pool");
    const std::size_t dim = windows.shape[2];
    if (params.query.size() != dim) throw std::invalid_argument("attn_pool: query size mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    Tensor out = Tensor::zeros({windows.shape[0], dim});
    for (std::size_t w = 0; w < windows.shape[0]; ++w) {
        double logits[kSlots], weights[kSlots];
        for (std::size_t s = 0; s < kSlots; ++s) {
            double acc = 0.0;
            for (std::size_t d = 0; d < dim; ++d) acc += params.query[d] * windows.at3(w, s, d);
            logits[s] = acc * scale;
        }
        softmax4(logits, weights);
        for (std::size_t s = 0; s < kSlots; ++s)
            for (std::size_t d = 0; d < dim; ++d) out.at2(w, d) += weights[s] * windows.at3(w, s, d);
    }
    return out;
}

std::vector<double> attn_pool_weights(const Tensor& windows, const PoolParams& params) {
    require_windows(windows, "attn_pool");
    const std::size_t dim = windows.shape[2];
    if (params.query.size() != dim) throw std::invalid_argument("attn_pool: query size mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<double> out(windows.shape[0] * kSlots);
    for (std::size_t w = 0; w < windows.shape[0]; ++w) {
        double logits[kSlots];
        for (std::size_t s = 0; s < kSlots; ++s) {
            double acc = 0.0;
            for (std::size_t d = 0; d < dim; ++d) acc += params.query[d] * windows.at3(w, s, d);
            logits[s] = acc * scale;
        }
        softmax4(logits, &out[w * kSlots]);
    }
    return out;
}

Tensor project(const Tensor& tokens, const ProjParams& params) {
    if (tokens.shape.size() != 2 || tokens.shape[1] != params.in_dim)
        throw std::invalid_argument("project: token dim mismatch");
    if (params.w.size() != params.in_dim * params.out_dim || params.b.size() != params.out_dim)
        throw std::invalid_argument("project: parameter sizes inconsistent");
    Tensor out = Tensor::zeros({tokens.shape[0], params.out_dim});
    for (std::size_t t = 0; t < tokens.shape[0]; ++t)
        for (std::size_t o = 0; o < params.out_dim; ++o) {
            double acc = params.b[o];
            for (std::size_t d = 0; d < params.in_dim; ++d)
                acc += tokens.at2(t, d) * params.w[d * params.out_dim + o];
            out.at2(t, o) = acc;
        }
    return out;
}

double cross_entropy(const std::vector<double>& logits, std::size_t target) {
    if (target >= logits.size()) throw std::invalid_argument("cross_entropy: target out of range");
    double m = logits[0];
    for (double x : logits) {
        if (!std::isfinite(x)) throw std::invalid_argument("cross_entropy: non-finite logit");
        m = std::max(m, x);
    }
    double sum = 0.0;
    for (double x : logits) sum += std::exp(x - m);
    return std::log(sum) - (logits[target] - m);
}

PipelineParams init_pipeline_params(std::size_t dim, std::size_t heads, std::size_t out_dim,
                                    std::uint64_t seed, bool zero_output_proj) {
    if (dim == 0 || heads == 0 || dim % heads != 0)
        throw std::invalid_argument("init_pipeline_params: dim must be a multiple of heads");
    Rng rng(seed);
    auto fill = [&rng](std::vector<double>& v, std::size_t n, double bound) {
        v.resize(n);
        for (double& x : v) x = rng.next_uniform(-bound, bound);
    };

    PipelineParams p;
    p.mhca.dim = dim;
    p.mhca.heads = heads;
    const double attn_bound = std::sqrt(3.0 / static_cast<double>(dim));
    fill(p.mhca.wq, dim * dim, attn_bound);
    fill(p.mhca.wk, dim * dim, attn_bound);
    fill(p.mhca.wv, dim * dim, attn_bound);
    if (zero_output_proj)
        p.mhca.wo.assign(dim * dim, 0.0);
    else
        fill(p.mhca.wo, dim * dim, attn_bound);
    p.mhca.bq.assign(dim, 0.0);
    p.mhca.bk.assign(dim, 0.0);
    p.mhca.bv.assign(dim, 0.0);
    p.mhca.bo.assign(dim, 0.0);
    fill(p.pool.query, dim, 1.0);
    p.proj.in_dim = dim;
    p.proj.out_dim = out_dim;
    const double proj_bound = std::sqrt(6.0 / static_cast<double>(dim + out_dim));
    fill(p.proj.w, dim * out_dim, proj_bound);
    p.proj.b.assign(out_dim, 0.0);
    return p;
}

double pipeline_loss(const Tensor& f, const Tensor& fctx, const PipelineParams& params,
                     std::size_t target) {
    const Tensor enriched = temporal_enrich(f, fctx, params.mhca);
    const Tensor tokens = attn_pool(enriched, params.pool);
    const Tensor projected = project(tokens, params.proj);
    std::vector<double> logits(params.proj.out_dim, 0.0);
    for (std::size_t t = 0; t < projected.shape[0]; ++t)
        for (std::size_t o = 0; o < params.proj.out_dim; ++o)
            logits[o] += projected.at2(t, o);
    for (double& x : logits) x /= static_cast<double>(projected.shape[0]);
    return cross_entropy(logits, target);
}

std::vector<double> flatten_params(const PipelineParams& p) {
    std::vector<double> out;
    for (const auto* v : {&p.mhca.wq, &p.mhca.bq, &p.mhca.wk, &p.mhca.bk, &p.mhca.wv, &p.mhca.bv,
                          &p.mhca.wo, &p.mhca.bo, &p.pool.query, &p.proj.w, &p.proj.b})
        out.insert(out.end(), v->begin(), v->end());
    return out;
}

void unflatten_params(const std::vector<double>& flat, PipelineParams& p) {
    std::size_t pos = 0;
    for (auto* v : {&p.mhca.wq, &p.mhca.bq, &p.mhca.wk, &p.mhca.bk, &p.mhca.wv, &p.mhca.bv,
                    &p.mhca.wo, &p.mhca.bo, &p.pool.query, &p.proj.w, &p.proj.b}) {
        if (pos + v->size() > flat.size())
            throw std::invalid_argument("unflatten_params: vector too short");
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + v->size()), v->begin());
        pos += v->size();
    }
    if (pos != flat.size()) throw std::invalid_argument("unflatten_params: size mismatch");
}

std::vector<std::string> param_names(const PipelineParams& p) {
    const std::pair<const char*, std::size_t> groups[] = {
        {"wq", p.mhca.wq.size()}, {"bq", p.mhca.bq.size()}, {"wk", p.mhca.wk.size()},
        {"bk", p.mhca.bk.size()}, {"wv", p.mhca.wv.size()}, {"bv", p.mhca.bv.size()},
        {"wo", p.mhca.wo.size()}, {"bo", p.mhca.bo.size()}, {"pool_q", p.pool.query.size()},
        {"proj_w", p.proj.w.size()}, {"proj_b", p.proj.b.size()},
    };
    std::vector<std::string> out;
    for (const auto& [name, n] : groups)
        for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(name) + "[" + std::to_string(i) + "]");
    return out;
}

std::vector<double> analytic_gradients(const Tensor& f, const Tensor& fctx,
                                       const PipelineParams& params, std::size_t target) {
    require_mhca_shapes(f, fctx, params.mhca);
    const std::size_t windows = f.shape[0];
    const std::size_t dim = params.mhca.dim;
    const std::size_t heads = params.mhca.heads;
    const std::size_t hd = dim / heads;
    const std::size_t out_dim = params.proj.out_dim;
    const double attn_scale = 1.0 / std::sqrt(static_cast<double>(hd));
    const double pool_scale = 1.0 / std::sqrt(static_cast<double>(dim));

    // forward with caches
    std::vector<WindowCache> caches;
    caches.reserve(windows);
    for (std::size_t w = 0; w < windows; ++w)
        caches.push_back(window_forward(&f.v[w * kSlots * dim], &fctx.v[w * kSlots * dim],
                                        params.mhca, params.pool));

    std::vector<double> logits(out_dim, 0.0);
    for (std::size_t w = 0; w < windows; ++w)
        for (std::size_t o = 0; o < out_dim; ++o) {
            double acc = params.proj.b[o];
            for (std::size_t d = 0; d < dim; ++d)
                acc += caches[w].token[d] * params.proj.w[d * out_dim + o];
            logits[o] += acc;
        }
    for (double& x : logits) x /= static_cast<double>(windows);

    // dL/dlogits = softmax - onehot
    double m = logits[0];
    for (double x : logits) m = std::max(m, x);
    double z_sum = 0.0;
    std::vector<double> dz(out_dim);
    for (std::size_t o = 0; o < out_dim; ++o) {
        dz[o] = std::exp(logits[o] - m);
        z_sum += dz[o];
    }
    for (std::size_t o = 0; o < out_dim; ++o) {
        dz[o] /= z_sum;
        if (o == target) dz[o] -= 1.0;
        dz[o] /= static_cast<double>(windows);  // token-mean factor
    }

    PipelineParams g = params;  // same shapes, zeroed below
    for (auto* v : {&g.mhca.wq, &g.mhca.bq, &g.mhca.wk, &g.mhca.bk, &g.mhca.wv, &g.mhca.bv,
                    &g.mhca.wo, &g.mhca.bo, &g.pool.query, &g.proj.w, &g.proj.b})
        std::fill(v->begin(), v->end(), 0.0);

    std::vector<double> d_enriched(kSlots * dim);
    std::vector<double> d_concat(kSlots * dim);
    std::vector<double> dq_mat(kSlots * dim), dk_mat(kSlots * dim), dv_mat(kSlots * dim);
    std::vector<double> d_token(dim);

    for (std::size_t w = 0; w < windows; ++w) {
        const WindowCache& c = caches[w];
        const double* xq = &f.v[w * kSlots * dim];
        const double* xc = &fctx.v[w * kSlots * dim];

        // projection
        for (std::size_t o = 0; o < out_dim; ++o) {
            g.proj.b[o] += dz[o];
            for (std::size_t d = 0; d < dim; ++d)
                g.proj.w[d * out_dim + o] += c.token[d] * dz[o];
        }
        for (std::size_t d = 0; d < dim; ++d) {
            double acc = 0.0;
            for (std::size_t o = 0; o < out_dim; ++o) acc += dz[o] * params.proj.w[d * out_dim + o];
            d_token[d] = acc;
        }

        // attention pooling
        std::fill(d_enriched.begin(), d_enriched.end(), 0.0);
        double da[kSlots];
        for (std::size_t s = 0; s < kSlots; ++s) {
            double acc = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                acc += d_token[d] * c.enriched[s * dim + d];
                d_enriched[s * dim + d] += c.pool_w[s] * d_token[d];
            }
            da[s] = acc;
        }
        double dot = 0.0;
        for (std::size_t s = 0; s < kSlots; ++s) dot += c.pool_w[s] * da[s];
        for (std::size_t s = 0; s < kSlots; ++s) {
            const double dl = c.pool_w[s] * (da[s] - dot);
            for (std::size_t d = 0; d < dim; ++d) {
                g.pool.query[d] += dl * c.enriched[s * dim + d] * pool_scale;
                d_enriched[s * dim + d] += dl * params.pool.query[d] * pool_scale;
            }
        }

        // residual: d(mhca output) = d_enriched (input branch carries no params)
        // output projection
        std::fill(d_concat.begin(), d_concat.end(), 0.0);
        for (std::size_t r = 0; r < kSlots; ++r) {
            for (std::size_t j = 0; j < dim; ++j) {
                const double dy = d_enriched[r * dim + j];
                g.mhca.bo[j] += dy;
                for (std::size_t i = 0; i < dim; ++i) {
                    g.mhca.wo[i * dim + j] += c.concat[r * dim + i] * dy;
                    d_concat[r * dim + i] += dy * params.mhca.wo[i * dim + j];
                }
            }
        }

        // per-head attention
        std::fill(dq_mat.begin(), dq_mat.end(), 0.0);
        std::fill(dk_mat.begin(), dk_mat.end(), 0.0);
        std::fill(dv_mat.begin(), dv_mat.end(), 0.0);
        for (std::size_t t = 0; t < heads; ++t) {
            const std::size_t off = t * hd;
            for (std::size_t r = 0; r < kSlots; ++r) {
                const double* p = &c.attn[(t * kSlots + r) * kSlots];
                double dp[kSlots];
                for (std::size_t col = 0; col < kSlots; ++col) {
                    double acc = 0.0;
                    for (std::size_t d = 0; d < hd; ++d) {
                        acc += d_concat[r * dim + off + d] * c.v[col * dim + off + d];
                        dv_mat[col * dim + off + d] += p[col] * d_concat[r * dim + off + d];
                    }
                    dp[col] = acc;
                }
                double row_dot = 0.0;
                for (std::size_t col = 0; col < kSlots; ++col) row_dot += p[col] * dp[col];
                for (std::size_t col = 0; col < kSlots; ++col) {
                    const double ds = p[col] * (dp[col] - row_dot) * attn_scale;
                    for (std::size_t d = 0; d < hd; ++d) {
                        dq_mat[r * dim + off + d] += ds * c.k[col * dim + off + d];
                        dk_mat[col * dim + off + d] += ds * c.q[r * dim + off + d];
                    }
                }
            }
        }

        // input projections
        for (std::size_t r = 0; r < kSlots; ++r) {
            for (std::size_t j = 0; j < dim; ++j) {
                g.mhca.bq[j] += dq_mat[r * dim + j];
                g.mhca.bk[j] += dk_mat[r * dim + j];
                g.mhca.bv[j] += dv_mat[r * dim + j];
                for (std::size_t i = 0; i < dim; ++i) {
                    g.mhca.wq[i * dim + j] += xq[r * dim + i] * dq_mat[r * dim + j];
                    g.mhca.wk[i * dim + j] += xc[r * dim + i] * dk_mat[r * dim + j];
                    g.mhca.wv[i * dim + j] += xc[r * dim + i] * dv_mat[r * dim + j];
                }
            }
        }
    }
    return flatten_params(g);
}

std::vector<double> numeric_gradients(const Tensor& f, const Tensor& fctx,
                                      const PipelineParams& params, std::size_t target,
                                      double h) {
    if (h <= 0.0) throw std::invalid_argument("numeric_gradients: h must be > 0");
    PipelineParams probe = params;
    std::vector<double> flat = flatten_params(params);
    std::vector<double> out(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double saved = flat[i];
        flat[i] = saved + h;
        unflatten_params(flat, probe);
        const double up = pipeline_loss(f, fctx, probe, target);
        flat[i] = saved - h;
        unflatten_params(flat, probe);
        const double down = pipeline_loss(f, fctx, probe, target);
        flat[i] = saved;
        out[i] = (up - down) / (2.0 * h);
    }
    unflatten_params(flat, probe);
    return out;
}

GradCheckResult compare_gradients(const std::vector<double>& analytic,
                                  const std::vector<double>& numeric,
                                  const std::vector<std::string>& names) {
    if (analytic.size() != numeric.size())
        throw std::invalid_argument("compare_gradients: size mismatch");
    GradCheckResult r;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        // The floor absorbs central-difference roundoff (~eps/2h) on
        // parameters whose true gradient is exactly zero, e.g. the key
        // bias, which softmax shift invariance cancels out of the loss.
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-6});
        const double rel = std::abs(analytic[i] - numeric[i]) / denom;
        if (rel > r.max_rel_err) {
            r.max_rel_err = rel;
            r.worst_index = i;
            r.worst_name = i < names.size() ? names[i] : std::to_string(i);
        }
    }
    return r;
}

GradCheckResult grad_check(const Tensor& f, const Tensor& fctx, const PipelineParams& params,
                           std::size_t target, double h) {
    const double loss = pipeline_loss(f, fctx, params, target);
    if (!std::isfinite(loss)) throw std::invalid_argument("grad_check: non-finite loss");
    return compare_gradients(analytic_gradients(f, fctx, params, target),
                             numeric_gradients(f, fctx, params, target, h),
                             param_names(params));
}

namespace {

void put_u32_le(std::ofstream& f, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64_le(std::ofstream& f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32_le(std::ifstream& f) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

std::uint64_t get_u64_le(std::ifstream& f) {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64_vec(std::ofstream& f, const std::string& name, const std::vector<double>& data) {
    put_u32_le(f, static_cast<std::uint32_t>(name.size()));
    f.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u64_le(f, data.size());
    for (double x : data) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        put_u64_le(f, bits);
    }
}

}  // namespace

void save_params(const PipelineParams& p, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write("VPTP", 4);
    f.put(0x01);
    const std::pair<const char*, const std::vector<double>*> entries[] = {
        {"wq", &p.mhca.wq},     {"bq", &p.mhca.bq},     {"wk", &p.mhca.wk},
        {"bk", &p.mhca.bk},     {"wv", &p.mhca.wv},     {"bv", &p.mhca.bv},
        {"wo", &p.mhca.wo},     {"bo", &p.mhca.bo},     {"pool_q", &p.pool.query},
        {"proj_w", &p.proj.w},  {"proj_b", &p.proj.b},
    };
    const std::vector<double> meta = {static_cast<double>(p.mhca.dim),
                                      static_cast<double>(p.mhca.heads),
                                      static_cast<double>(p.proj.out_dim)};
    put_u32_le(f, static_cast<std::uint32_t>(std::size(entries)) + 1);
    put_f64_vec(f, "meta", meta);
    for (const auto& [name, data] : entries) put_f64_vec(f, name, *data);
    if (!f) throw std::runtime_error("write failed: " + path);
}

PipelineParams load_params(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "VPTP", 4) != 0)
        throw std::runtime_error("bad parameter snapshot magic: " + path);
    if (f.get() != 0x01) throw std::runtime_error("unsupported snapshot version: " + path);

    const std::uint32_t count = get_u32_le(f);
    PipelineParams p;
    std::vector<double> meta;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = get_u32_le(f);
        std::string name(name_len, '\0');
        f.read(name.data(), name_len);
        const std::uint64_t n = get_u64_le(f);
        std::vector<double> data(n);
        for (std::uint64_t j = 0; j < n; ++j) {
            const std::uint64_t bits = get_u64_le(f);
            std::memcpy(&data[j], &bits, 8);
        }
        if (!f) throw std::runtime_error("truncated parameter snapshot: " + path);
        if (name == "meta") meta = data;
        else if (name == "wq") p.mhca.wq = data;
        else if (name == "bq") p.mhca.bq = data;
        else if (name == "wk") p.mhca.wk = data;
        else if (name == "bk") p.mhca.bk = data;
        else if (name == "wv") p.mhca.wv = data;
        else if (name == "bv") p.mhca.bv = data;
        else if (name == "wo") p.mhca.wo = data;
        else if (name == "bo") p.mhca.bo = data;
        else if (name == "pool_q") p.pool.query = data;
        else if (name == "proj_w") p.proj.w = data;
        else if (name == "proj_b") p.proj.b = data;
        else throw std::runtime_error("unknown snapshot tensor: " + name);
    }
    if (meta.size() != 3) throw std::runtime_error("snapshot missing meta entry: " + path);
    p.mhca.dim = static_cast<std::size_t>(meta[0]);
    p.mhca.heads = static_cast<std::size_t>(meta[1]);
    p.proj.in_dim = p.mhca.dim;
    p.proj.out_dim = static_cast<std::size_t>(meta[2]);
    return p;
}

}  // namespace vpoint

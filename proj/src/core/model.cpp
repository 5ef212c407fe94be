#include "core/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace survkit {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

MlpHead init_head(Rng& rng, int input_dim, const std::vector<int>& hidden, HeadOutput output) {
  MlpHead head;
  head.output = output;
  head.layer_sizes.push_back(input_dim);
  for (int h : hidden) head.layer_sizes.push_back(h);
  head.layer_sizes.push_back(output == HeadOutput::Risk ? 1 : 2);

  for (int s : head.layer_sizes)
    if (s < 1) throw ConfigError("model: layer sizes must be >= 1");

  for (std::size_t l = 0; l + 1 < head.layer_sizes.size(); ++l) {
    const int fan_in = head.layer_sizes[l];
    const int fan_out = head.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    for (auto& x : w) x = rng.uniform(-limit, limit);
    head.weights.push_back(std::move(w));
    head.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return head;
}

// Runs one sample through a head; appends every layer's activations to
// `acts` (acts[l] grows by layer_sizes[l] values).
void head_forward(const MlpHead& head, std::span<const double> input,
                  std::vector<std::vector<double>>* acts, double* out, std::size_t out_stride) {
  const std::size_t n_layers = head.n_layers();
  std::vector<double> cur(input.begin(), input.end());
  if (acts) (*acts)[0].insert((*acts)[0].end(), cur.begin(), cur.end());

  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in_w = head.layer_sizes[l];
    const int out_w = head.layer_sizes[l + 1];
    std::vector<double> next(static_cast<std::size_t>(out_w));
    const auto& W = head.weights[l];
    const auto& b = head.biases[l];
    for (int o = 0; o < out_w; ++o) {
      double z = b[static_cast<std::size_t>(o)];
      const double* row = W.data() + static_cast<std::size_t>(o) * in_w;
      for (int i = 0; i < in_w; ++i) z += row[i] * cur[static_cast<std::size_t>(i)];
      if (l + 1 < n_layers)
        next[static_cast<std::size_t>(o)] = z > 0.0 ? z : 0.0;
      else
        next[static_cast<std::size_t>(o)] = head.output == HeadOutput::Risk ? stable_sigmoid(z) : z;
    }
    cur = std::move(next);
    if (acts) (*acts)[l + 1].insert((*acts)[l + 1].end(), cur.begin(), cur.end());
  }
  for (std::size_t o = 0; o < cur.size(); ++o) out[o * out_stride] = cur[o];
}

HeadGradients zero_gradients(const MlpHead& head) {
  HeadGradients g;
  for (std::size_t l = 0; l < head.n_layers(); ++l) {
    g.weights.emplace_back(head.weights[l].size(), 0.0);
    g.biases.emplace_back(head.biases[l].size(), 0.0);
  }
  return g;
}

// Backprop for one sample already in the cache. `upstream` has output_dim
// entries; activations for sample s live at offset s*width in each layer.
void head_backward(const MlpHead& head, const std::vector<std::vector<double>>& acts,
                   std::size_t sample, std::span<const double> upstream, HeadGradients& grads) {
  const std::size_t n_layers = head.n_layers();
  const int out_w = head.output_dim();

  std::vector<double> delta(static_cast<std::size_t>(out_w));
  for (int o = 0; o < out_w; ++o) {
    const double a = acts[n_layers][sample * out_w + static_cast<std::size_t>(o)];
    const double act_deriv = head.output == HeadOutput::Risk ? a * (1.0 - a) : 1.0;
    delta[static_cast<std::size_t>(o)] = upstream[static_cast<std::size_t>(o)] * act_deriv;
  }

  for (std::size_t l = n_layers; l-- > 0;) {
    const int in_w = head.layer_sizes[l];
    const int cur_w = head.layer_sizes[l + 1];
    const double* a_in = acts[l].data() + sample * static_cast<std::size_t>(in_w);
    auto& gW = grads.weights[l];
    auto& gb = grads.biases[l];
    for (int o = 0; o < cur_w; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      double* grow = gW.data() + static_cast<std::size_t>(o) * in_w;
      for (int i = 0; i < in_w; ++i) grow[i] += d * a_in[i];
      gb[static_cast<std::size_t>(o)] += d;
    }
    if (l == 0) break;

    std::vector<double> prev(static_cast<std::size_t>(in_w), 0.0);
    const auto& W = head.weights[l];
    for (int o = 0; o < cur_w; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      const double* row = W.data() + static_cast<std::size_t>(o) * in_w;
      for (int i = 0; i < in_w; ++i) prev[static_cast<std::size_t>(i)] += row[i] * d;
    }
    // Hidden activations are ReLU outputs; a zero output means the unit was
    // inactive and passes no gradient.
    for (int i = 0; i < in_w; ++i)
      if (!(a_in[i] > 0.0)) prev[static_cast<std::size_t>(i)] = 0.0;
    delta = std::move(prev);
  }
}

void check_dims(const RiskModel& model, const Dataset& ds) {
  if (model.head_a.input_dim() != static_cast<int>(ds.dim_a) ||
      model.head_b.input_dim() != static_cast<int>(ds.dim_b))
    throw DataError("model expects feature dims (" + std::to_string(model.head_a.input_dim()) + "," +
                    std::to_string(model.head_b.input_dim()) + "), dataset has (" +
                    std::to_string(ds.dim_a) + "," + std::to_string(ds.dim_b) + ")");
}

}  // namespace

RiskModel init_model(std::uint64_t seed, int dim_a, int dim_b, const std::vector<int>& hidden_a,
                     const std::vector<int>& hidden_b, FusionWeights fusion, HeadOutput output) {
  if (dim_a < 1 || dim_b < 1) throw ConfigError("model: input dims must be >= 1");
  if (fusion.w_nv < 0.0 || fusion.w_v < 0.0 || std::abs(fusion.w_nv + fusion.w_v - 1.0) > 1e-9)
    throw ConfigError("model: fusion weights must be nonnegative and sum to 1");
  Rng rng(seed);
  RiskModel model;
  model.head_a = init_head(rng, dim_a, hidden_a, output);
  model.head_b = init_head(rng, dim_b, hidden_b, output);
  model.fusion = fusion;
  return model;
}

ForwardResult forward(const RiskModel& model, const SurvivalRecord& record) {
  if (model.output_kind() != HeadOutput::Risk)
    throw DataError("forward: single-record pass requires Risk heads");
  if (record.features_a.size() != static_cast<std::size_t>(model.head_a.input_dim()) ||
      record.features_b.size() != static_cast<std::size_t>(model.head_b.input_dim()))
    throw DataError("forward: record dims do not match model");
  ForwardResult r;
  head_forward(model.head_a, record.features_a, nullptr, &r.out_a, 1);
  head_forward(model.head_b, record.features_b, nullptr, &r.out_b, 1);
  r.fused = model.fusion.w_nv * r.out_a + model.fusion.w_v * r.out_b;
  return r;
}

std::vector<double> forward_batch(const RiskModel& model, const Dataset& ds,
                                  std::span<const std::size_t> indices, ForwardCache& cache) {
  check_dims(model, ds);
  const std::size_t width = model.outputs_per_sample();
  cache.batch = indices.size();
  cache.acts_a.assign(model.head_a.n_layers() + 1, {});
  cache.acts_b.assign(model.head_b.n_layers() + 1, {});

  std::vector<double> fused(indices.size() * width);
  std::vector<double> oa(width), ob(width);
  for (std::size_t s = 0; s < indices.size(); ++s) {
    const auto& rec = ds.records[indices[s]];
    head_forward(model.head_a, rec.features_a, &cache.acts_a, oa.data(), 1);
    head_forward(model.head_b, rec.features_b, &cache.acts_b, ob.data(), 1);
    for (std::size_t o = 0; o < width; ++o)
      fused[s * width + o] = model.fusion.w_nv * oa[o] + model.fusion.w_v * ob[o];
  }
  return fused;
}

std::vector<double> forward_batch(const RiskModel& model, const Dataset& ds,
                                  std::span<const std::size_t> indices) {
  ForwardCache cache;
  return forward_batch(model, ds, indices, cache);
}

std::vector<double> forward_batch(const RiskModel& model, const Dataset& ds) {
  std::vector<std::size_t> idx(ds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return forward_batch(model, ds, idx);
}

std::vector<double> predict_risks(const RiskModel& model, const Dataset& ds) {
  std::vector<double> fused = forward_batch(model, ds);
  if (model.output_kind() == HeadOutput::Risk) return fused;
  std::vector<double> risks(ds.size());
  for (std::size_t i = 0; i < risks.size(); ++i)
    risks[i] = stable_sigmoid(fused[2 * i] - fused[2 * i + 1]);
  return risks;
}

ParameterGradients backward(const RiskModel& model, const ForwardCache& cache,
                            std::span<const double> upstream_grad) {
  const std::size_t width = model.outputs_per_sample();
  if (upstream_grad.size() != cache.batch * width)
    throw DataError("backward: upstream gradient size does not match cached batch");

  ParameterGradients grads;
  grads.head_a = zero_gradients(model.head_a);
  grads.head_b = zero_gradients(model.head_b);

  std::vector<double> ga(width), gb(width);
  for (std::size_t s = 0; s < cache.batch; ++s) {
    for (std::size_t o = 0; o < width; ++o) {
      const double u = upstream_grad[s * width + o];
      ga[o] = model.fusion.w_nv * u;
      gb[o] = model.fusion.w_v * u;
    }
    head_backward(model.head_a, cache.acts_a, s, ga, grads.head_a);
    head_backward(model.head_b, cache.acts_b, s, gb, grads.head_b);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O. Fixed little-endian layout:
//   magic "SVKMODL1", u32 output kind, f64 w_nv, f64 w_v,
//   per head: u32 layer count, u32 sizes..., then per layer f64 weights
//   (row-major out x in) followed by f64 biases.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'V', 'K', 'M', 'O', 'D', 'L', '1'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw DataError("checkpoint: truncated file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
    return std::bit_cast<double>(v);
  }
};

void put_head_layout(std::string& buf, const MlpHead& head) {
  put_u32(buf, static_cast<std::uint32_t>(head.layer_sizes.size()));
  for (int s : head.layer_sizes) put_u32(buf, static_cast<std::uint32_t>(s));
}

void put_head_params(std::string& buf, const MlpHead& head) {
  for (std::size_t l = 0; l < head.n_layers(); ++l) {
    for (double v : head.weights[l]) put_f64(buf, v);
    for (double v : head.biases[l]) put_f64(buf, v);
  }
}

MlpHead read_head_layout(Reader& r, HeadOutput output) {
  MlpHead head;
  head.output = output;
  const std::uint32_t n = r.u32();
  if (n < 2 || n > 64) throw DataError("checkpoint: implausible layer count");
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t s = r.u32();
    if (s < 1 || s > 1u << 20) throw DataError("checkpoint: implausible layer size");
    head.layer_sizes.push_back(static_cast<int>(s));
  }
  const int want_out = output == HeadOutput::Risk ? 1 : 2;
  if (head.layer_sizes.back() != want_out)
    throw DataError("checkpoint: output width does not match head kind");
  return head;
}

void read_head_params(Reader& r, MlpHead& head) {
  for (std::size_t l = 0; l + 1 < head.layer_sizes.size(); ++l) {
    const auto out_w = static_cast<std::size_t>(head.layer_sizes[l + 1]);
    const auto in_w = static_cast<std::size_t>(head.layer_sizes[l]);
    std::vector<double> w(out_w * in_w);
    for (auto& v : w) v = r.f64();
    std::vector<double> b(out_w);
    for (auto& v : b) v = r.f64();
    head.weights.push_back(std::move(w));
    head.biases.push_back(std::move(b));
  }
}

}  // namespace

void save_checkpoint(const RiskModel& model, const std::string& path) {
  std::string buf(kMagic, sizeof(kMagic));
  put_u32(buf, static_cast<std::uint32_t>(model.output_kind()));
  put_f64(buf, model.fusion.w_nv);
  put_f64(buf, model.fusion.w_v);
  put_head_layout(buf, model.head_a);
  put_head_layout(buf, model.head_b);
  put_head_params(buf, model.head_a);
  put_head_params(buf, model.head_b);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write checkpoint '" + path + "'");
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw DataError("write failed for checkpoint '" + path + "'");
}

RiskModel load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  Reader r{buf};
  r.need(sizeof(kMagic));
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError("'" + path + "' is not a survkit checkpoint");
  r.pos = sizeof(kMagic);

  const std::uint32_t kind = r.u32();
  if (kind > 1) throw DataError("checkpoint: unknown head kind");
  const auto output = static_cast<HeadOutput>(kind);

  RiskModel model;
  model.fusion.w_nv = r.f64();
  model.fusion.w_v = r.f64();
  model.head_a = read_head_layout(r, output);
  model.head_b = read_head_layout(r, output);
  read_head_params(r, model.head_a);
  read_head_params(r, model.head_b);
  if (r.pos != buf.size()) throw DataError("checkpoint: trailing bytes");
  return model;
}

}  // namespace survkit

// Copyright 2026 The GOAS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "goas/networks.hpp"

#include <cmath>
#include <random>

namespace goas {

// ------------------------------------------------------------ ArchConfig

double ArchConfig::activation_slope() const {
  if (activation == "leaky_relu") return leaky_slope;
  if (activation == "relu") return 0.0;
  throw ValidationError("unknown activation '" + activation + "' (expected leaky_relu or relu)");
}

bool ArchConfig::instance_norm() const {
  if (norm == "none") return false;
  if (norm == "instance") return true;
  throw ValidationError("unknown norm '" + norm + "' (expected none or instance)");
}

void ArchConfig::validate() const {
  auto check = [](const std::vector<int>& widths, std::size_t expected, const char* key) {
    if (widths.size() != expected) {
      throw ValidationError(std::string(key) + " must list " + std::to_string(expected) + " widths, got " +
                            std::to_string(widths.size()));
    }
    for (int w : widths) {
      if (w < 1) throw ValidationError(std::string(key) + " widths must be positive");
    }
  };
  check(gen_channels, 7, "gen.channels");
  check(disc_channels, 10, "disc.channels");
  check(lab_channels, 11, "lab.channels");
  check(pad_channels, 4, "pad.channels");
  if (disc_hidden < 1 || lab_hidden < 1) throw ValidationError("hidden widths must be positive");
  if (pad_map_size < 1) throw ValidationError("pad.map_size must be positive");
  activation_slope();
  instance_norm();
}

ArchConfig ArchConfig::toy() {
  ArchConfig a;
  a.gen_channels = {4, 4, 3, 3, 4, 4, 3};
  a.disc_channels = {3, 3, 4, 4, 3, 3, 4, 4, 3, 3};
  a.disc_hidden = 4;
  a.lab_channels = {3, 3, 4, 4, 3, 3, 4, 4, 3, 3, 4};
  a.lab_hidden = 4;
  a.pad_channels = {3, 4, 4, 3};
  a.pad_map_size = 1;
  a.gen_zero_head = false;
  a.lab_zero_head = false;
  a.pad_zero_head = false;
  return a;
}

void to_json(nlohmann::json& j, const ArchConfig& a) {
  j = nlohmann::json{{"gen.channels", a.gen_channels}, {"disc.channels", a.disc_channels},
                     {"disc.hidden", a.disc_hidden},   {"lab.channels", a.lab_channels},
                     {"lab.hidden", a.lab_hidden},     {"pad.channels", a.pad_channels},
                     {"pad.map_size", a.pad_map_size}, {"activation", a.activation},
                     {"leaky_slope", a.leaky_slope},   {"norm", a.norm},
                     {"gen.zero_head", a.gen_zero_head}, {"lab.zero_head", a.lab_zero_head},
                     {"pad.zero_head", a.pad_zero_head}};
}

void from_json(const nlohmann::json& j, ArchConfig& a) {
  static const std::vector<std::string> known = {
      "gen.channels", "disc.channels", "disc.hidden", "lab.channels",  "lab.hidden",    "pad.channels", "pad.map_size",
      "activation",   "leaky_slope",   "norm",        "gen.zero_head", "lab.zero_head", "pad.zero_head"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ValidationError("unknown architecture key '" + item.key() + "'");
    }
  }
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("gen.channels", a.gen_channels);
  get("disc.channels", a.disc_channels);
  get("disc.hidden", a.disc_hidden);
  get("lab.channels", a.lab_channels);
  get("lab.hidden", a.lab_hidden);
  get("pad.channels", a.pad_channels);
  get("pad.map_size", a.pad_map_size);
  get("activation", a.activation);
  get("leaky_slope", a.leaky_slope);
  get("norm", a.norm);
  get("gen.zero_head", a.gen_zero_head);
  get("lab.zero_head", a.lab_zero_head);
  get("pad.zero_head", a.pad_zero_head);
  a.validate();
}

// ---------------------------------------------------------- conditioning

std::string to_string(ConditioningMode mode) {
  return mode == ConditioningMode::kPrototypes ? "prototypes" : "onehot-maps";
}

ConditioningMode parse_conditioning_mode(const std::string& name) {
  if (name == "prototypes") return ConditioningMode::kPrototypes;
  if (name == "onehot-maps") return ConditioningMode::kOneHotMaps;
  throw ValidationError("unknown conditioning mode '" + name + "'");
}

int conditioning_channels(ConditioningMode mode, int num_sensors, int num_mediums) {
  return mode == ConditioningMode::kPrototypes ? 2 : num_sensors + num_mediums;
}

template <typename T>
Tensor<T> build_conditioning(ConditioningMode mode, const NoisePrototypeBank<T>* bank, const Tensor<T>& sensor_weights,
                             const Tensor<T>& medium_weights, int size) {
  const int batch = sensor_weights.dim(0);
  const int n_c = sensor_weights.dim(1), n_m = medium_weights.dim(1);
  if (medium_weights.dim(0) != batch) throw ShapeError("conditioning: weight batch sizes differ");
  const std::size_t plane = static_cast<std::size_t>(size) * size;
  if (mode == ConditioningMode::kPrototypes) {
    if (bank == nullptr) throw ValidationError("prototype conditioning requires a noise bank");
    if (bank->size() != size) {
      throw ShapeError("bank prototypes are " + std::to_string(bank->size()) + " px, generator patch is " +
                       std::to_string(size));
    }
    Tensor<T> out({batch, 2, size, size});
    for (int b = 0; b < batch; ++b) {
      const auto noise = select_prototype(*bank, sensor_weights.slice0(b), medium_weights.slice0(b));
      std::copy(noise.sensor.storage().begin(), noise.sensor.storage().end(), &out.at(b, 0, 0, 0));
      std::copy(noise.medium.storage().begin(), noise.medium.storage().end(), &out.at(b, 1, 0, 0));
    }
    return out;
  }
  Tensor<T> out({batch, n_c + n_m, size, size});
  for (int b = 0; b < batch; ++b) {
    for (int k = 0; k < n_c + n_m; ++k) {
      const T w = k < n_c ? sensor_weights.at(b, k) : medium_weights.at(b, k - n_c);
      T* dst = &out.at(b, k, 0, 0);
      std::fill(dst, dst + plane, w);
    }
  }
  return out;
}

template <typename T>
void backprop_conditioning(ConditioningMode mode, NoisePrototypeBank<T>* bank, const Tensor<T>& sensor_weights,
                           const Tensor<T>& medium_weights, const Tensor<T>& grad_conditioning) {
  if (mode != ConditioningMode::kPrototypes || bank == nullptr) return;
  const int batch = grad_conditioning.dim(0), size = grad_conditioning.dim(2);
  const std::size_t plane = static_cast<std::size_t>(size) * size;
  for (int b = 0; b < batch; ++b) {
    const T* g = &grad_conditioning.at(b, 0, 0, 0);
    Tensor<T> grad_sensor({size, size}, std::vector<T>(g, g + plane));
    Tensor<T> grad_medium({size, size}, std::vector<T>(g + plane, g + 2 * plane));
    accumulate_selection_grad(*bank, sensor_weights.slice0(b), medium_weights.slice0(b), grad_sensor, grad_medium);
  }
}

namespace {

template <typename T>
Tensor<T> shift_to_signed(const Tensor<T>& images) {
  Tensor<T> out = images;
  for (auto& v : out.values()) v = T(2) * v - T(1);
  return out;
}

template <typename T>
void require_images(const Tensor<T>& images, int size, const char* who) {
  if (images.rank() != 4 || images.dim(1) != 3 || (size > 0 && (images.dim(2) != size || images.dim(3) != size))) {
    throw ShapeError(std::string(who) + ": expected B x 3 x " + std::to_string(size) + " x " + std::to_string(size) +
                     " images, got " + shape_string(images.shape()));
  }
}

template <typename T>
void add_activation(nn::Sequential<T>& net, const ArchConfig& arch, bool norm) {
  if (norm && arch.instance_norm()) net.template emplace<nn::InstanceNorm2d<T>>();
  net.template emplace<nn::LeakyRelu<T>>(static_cast<T>(arch.activation_slope()));
}

}  // namespace

// ------------------------------------------------------------------ GoGen

template <typename T>
GoGen<T>::GoGen(const ArchConfig& arch, int condition_channels, std::uint64_t seed)
    : condition_channels_(condition_channels) {
  arch.validate();
  std::mt19937_64 rng(seed);
  const double slope = arch.activation_slope();
  int in = 3 + condition_channels;
  for (std::size_t i = 0; i < arch.gen_channels.size(); ++i) {
    auto& conv = trunk_.template emplace<nn::Conv2d<T>>(in, arch.gen_channels[i], 3, 1, 1, "gen.conv" + std::to_string(i));
    conv.init_he(rng, slope);
    add_activation(trunk_, arch, true);
    in = arch.gen_channels[i];
  }
  auto& head = trunk_.template emplace<nn::Conv2d<T>>(in, 3, 3, 1, 1, "gen.conv7");
  if (arch.gen_zero_head) {
    head.init_zero();
  } else {
    head.init_he(rng, 1.0);
  }
}

template <typename T>
Tensor<T> GoGen<T>::forward(const Tensor<T>& images, const Tensor<T>& conditioning) {
  require_images(images, 0, "gogen");
  const int batch = images.dim(0), h = images.dim(2), w = images.dim(3);
  if (conditioning.shape() != Shape{batch, condition_channels_, h, w}) {
    throw ShapeError("gogen: conditioning must be " + shape_string({batch, condition_channels_, h, w}) + ", got " +
                     shape_string(conditioning.shape()));
  }
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  Tensor<T> input({batch, 3 + condition_channels_, h, w});
  for (int b = 0; b < batch; ++b) {
    const T* src = &images.at(b, 0, 0, 0);
    T* dst = &input.at(b, 0, 0, 0);
    for (std::size_t i = 0; i < 3 * plane; ++i) dst[i] = T(2) * src[i] - T(1);
    const T* cond = &conditioning.at(b, 0, 0, 0);
    std::copy(cond, cond + condition_channels_ * plane, dst + 3 * plane);
  }
  tanh_ = trunk_.forward(input);
  Tensor<T> out = images;
  pass_.assign(out.size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    tanh_[i] = std::tanh(tanh_[i]);
    const T v = images[i] + tanh_[i];
    pass_[i] = v > T(0) && v < T(1);
    out[i] = std::clamp(v, T(0), T(1));
  }
  return out;
}

template <typename T>
GeneratorGrads<T> GoGen<T>::backward(const Tensor<T>& grad_output) {
  tanh_.require_same_shape(grad_output, "gogen backward");
  Tensor<T> grad_residual = grad_output;
  Tensor<T> grad_pre(grad_output.shape());
  for (std::size_t i = 0; i < grad_output.size(); ++i) {
    const T g = pass_[i] ? grad_output[i] : T(0);
    grad_residual[i] = g;
    grad_pre[i] = g * (T(1) - tanh_[i] * tanh_[i]);
  }
  const Tensor<T> grad_input = trunk_.backward(grad_pre);
  const int batch = grad_output.dim(0), h = grad_output.dim(2), w = grad_output.dim(3);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  GeneratorGrads<T> grads{grad_residual, Tensor<T>({batch, condition_channels_, h, w})};
  for (int b = 0; b < batch; ++b) {
    const T* src = &grad_input.at(b, 0, 0, 0);
    T* img = &grads.images.at(b, 0, 0, 0);
    for (std::size_t i = 0; i < 3 * plane; ++i) img[i] += T(2) * src[i];
    std::copy(src + 3 * plane, src + (3 + condition_channels_) * plane, &grads.conditioning.at(b, 0, 0, 0));
  }
  return grads;
}

// ----------------------------------------------------------------- GoDisc

template <typename T>
GoDisc<T>::GoDisc(const ArchConfig& arch, int patch_size, std::uint64_t seed) : patch_size_(patch_size) {
  arch.validate();
  std::mt19937_64 rng(seed);
  const double slope = arch.activation_slope();
  int in = 3, size = patch_size;
  for (std::size_t i = 0; i < arch.disc_channels.size(); ++i) {
    const int stride = (i % 2 == 1) ? 2 : 1;
    auto& conv = net_.template emplace<nn::Conv2d<T>>(in, arch.disc_channels[i], 3, stride, 1,
                                                      "disc.conv" + std::to_string(i));
    conv.init_he(rng, slope);
    add_activation(net_, arch, true);
    in = arch.disc_channels[i];
    if (stride == 2) size = (size - 1) / 2 + 1;
  }
  net_.template emplace<nn::Flatten<T>>();
  auto& fc0 = net_.template emplace<nn::Linear<T>>(in * size * size, arch.disc_hidden, "disc.fc0");
  fc0.init_he(rng, slope);
  add_activation(net_, arch, false);
  auto& fc1 = net_.template emplace<nn::Linear<T>>(arch.disc_hidden, 2, "disc.fc1");
  fc1.init_he(rng, 1.0);
}

template <typename T>
Tensor<T> GoDisc<T>::forward(const Tensor<T>& images) {
  require_images(images, patch_size_, "godisc");
  probs_ = nn::softmax(net_.forward(shift_to_signed(images)));
  return probs_;
}

template <typename T>
Tensor<T> GoDisc<T>::backward(const Tensor<T>& grad_probs) {
  Tensor<T> grad = net_.backward(nn::softmax_backward(probs_, grad_probs));
  grad *= T(2);
  return grad;
}

// ------------------------------------------------------------------ GoLab

template <typename T>
GoLab<T>::GoLab(const ArchConfig& arch, int num_sensors, int num_mediums, std::uint64_t seed)
    : num_sensors_(num_sensors), num_mediums_(num_mediums) {
  arch.validate();
  if (num_sensors < 1 || num_mediums < 2) throw ValidationError("golab needs n_c >= 1 and n_m >= 2");
  std::mt19937_64 rng(seed);
  const double slope = arch.activation_slope();
  int in = 3;
  for (std::size_t i = 0; i < arch.lab_channels.size(); ++i) {
    auto& conv = trunk_.template emplace<nn::Conv2d<T>>(in, arch.lab_channels[i], 3, 1, 1,
                                                        "lab.conv" + std::to_string(i));
    conv.init_he(rng, slope);
    add_activation(trunk_, arch, true);
    if (i == 2 || i == 5 || i == 8) trunk_.template emplace<nn::MaxPool2d<T>>();
    in = arch.lab_channels[i];
  }
  trunk_.template emplace<nn::GlobalAvgPool<T>>();
  auto make_head = [&](nn::Sequential<T>& head, int classes, const std::string& name) {
    auto& fc0 = head.template emplace<nn::Linear<T>>(in, arch.lab_hidden, name + ".fc0");
    fc0.init_he(rng, slope);
    add_activation(head, arch, false);
    auto& fc1 = head.template emplace<nn::Linear<T>>(arch.lab_hidden, classes, name + ".fc1");
    if (arch.lab_zero_head) {
      fc1.init_zero();
    } else {
      fc1.init_he(rng, 1.0);
    }
  };
  make_head(head_c_, num_sensors, "lab.sensor");
  make_head(head_m_, num_mediums, "lab.medium");
}

template <typename T>
LabOutput<T> GoLab<T>::forward(const Tensor<T>& images) {
  require_images(images, 0, "golab");
  input_shape_ = images.shape();
  const Tensor<T> features = trunk_.forward(shift_to_signed(images));
  last_.logits_c = head_c_.forward(features);
  last_.logits_m = head_m_.forward(features);
  last_.probs_c = nn::softmax(last_.logits_c);
  last_.probs_m = nn::softmax(last_.logits_m);
  return last_;
}

template <typename T>
Tensor<T> GoLab<T>::backward(const Tensor<T>& grad_probs_c, const Tensor<T>& grad_probs_m) {
  Tensor<T> grad_features;
  auto accumulate = [&grad_features](Tensor<T> g) {
    if (grad_features.empty()) {
      grad_features = std::move(g);
    } else {
      grad_features += g;
    }
  };
  if (!grad_probs_c.empty()) accumulate(head_c_.backward(nn::softmax_backward(last_.probs_c, grad_probs_c)));
  if (!grad_probs_m.empty()) accumulate(head_m_.backward(nn::softmax_backward(last_.probs_m, grad_probs_m)));
  if (grad_features.empty()) return Tensor<T>(input_shape_);
  Tensor<T> grad = trunk_.backward(grad_features);
  grad *= T(2);
  return grad;
}

template <typename T>
std::vector<nn::Parameter<T>*> GoLab<T>::parameters() {
  auto params = trunk_.parameters();
  for (auto* p : head_c_.parameters()) params.push_back(p);
  for (auto* p : head_m_.parameters()) params.push_back(p);
  return params;
}

template <typename T>
void GoLab<T>::set_param_grads(bool enabled) {
  trunk_.set_param_grads(enabled);
  head_c_.set_param_grads(enabled);
  head_m_.set_param_grads(enabled);
}

template <typename T>
std::vector<double> golab_spoof_score(const LabOutput<T>& output) {
  std::vector<double> scores(output.probs_m.dim(0));
  for (std::size_t b = 0; b < scores.size(); ++b) {
    scores[b] = std::clamp(1.0 - static_cast<double>(output.probs_m.at(static_cast<int>(b), 0)), 0.0, 1.0);
  }
  return scores;
}

// ------------------------------------------------------------------ GoPad

template <typename T>
GoPad<T>::GoPad(const ArchConfig& arch, int patch_size, std::uint64_t seed)
    : GoPad(arch, arch.pad_channels, patch_size, seed) {}

template <typename T>
GoPad<T>::GoPad(const ArchConfig& arch, const std::vector<int>& channels, int patch_size, std::uint64_t seed)
    : patch_size_(patch_size), map_size_(arch.pad_map_size) {
  arch.validate();
  if (channels.size() != 4) throw ValidationError("pad.channels must list 4 widths");
  int downsamples = 0;
  while ((map_size_ << downsamples) < patch_size_ && downsamples < 3) ++downsamples;
  if ((map_size_ << downsamples) != patch_size_) {
    throw ValidationError("pad.map_size " + std::to_string(map_size_) + " must equal the patch size " +
                          std::to_string(patch_size_) + " divided by 1, 2, 4 or 8");
  }
  std::mt19937_64 rng(seed);
  const double slope = arch.activation_slope();
  auto& stem = net_.template emplace<nn::Conv2d<T>>(3, channels[0], 3, 1, 1, "pad.stem");
  stem.init_he(rng, slope);
  add_activation(net_, arch, true);
  for (int s = 0; s < 3; ++s) {
    const int stride = s < downsamples ? 2 : 1;
    auto& dw = net_.template emplace<nn::DepthwiseConv2d<T>>(channels[s], stride, "pad.stage" + std::to_string(s) + ".dw");
    dw.init_he(rng, 1.0);
    auto& pw = net_.template emplace<nn::Conv2d<T>>(channels[s], channels[s + 1], 1, 1, 0,
                                                    "pad.stage" + std::to_string(s) + ".pw");
    pw.init_he(rng, slope);
    add_activation(net_, arch, true);
  }
  auto& head = net_.template emplace<nn::Conv2d<T>>(channels[3], 1, 1, 1, 0, "pad.head");
  if (arch.pad_zero_head) {
    head.init_zero();
  } else {
    head.init_he(rng, 1.0);
  }
  net_.template emplace<nn::Sigmoid<T>>();
}

template <typename T>
Tensor<T> GoPad<T>::forward(const Tensor<T>& images) {
  require_images(images, patch_size_, "gopad");
  Tensor<T> map = net_.forward(shift_to_signed(images));
  map.reshape({map.dim(0), map.dim(2), map.dim(3)});
  return map;
}

template <typename T>
Tensor<T> GoPad<T>::backward(const Tensor<T>& grad_map) {
  Tensor<T> grad = net_.backward(grad_map.reshaped({grad_map.dim(0), 1, grad_map.dim(1), grad_map.dim(2)}));
  grad *= T(2);
  return grad;
}

#define GOAS_INSTANTIATE(T)                                                                                     \
  template Tensor<T> build_conditioning<T>(ConditioningMode, const NoisePrototypeBank<T>*, const Tensor<T>&,    \
                                           const Tensor<T>&, int);                                              \
  template void backprop_conditioning<T>(ConditioningMode, NoisePrototypeBank<T>*, const Tensor<T>&,            \
                                         const Tensor<T>&, const Tensor<T>&);                                   \
  template class GoGen<T>;                                                                                      \
  template class GoDisc<T>;                                                                                     \
  template class GoLab<T>;                                                                                      \
  template class GoPad<T>;                                                                                      \
  template std::vector<double> golab_spoof_score<T>(const LabOutput<T>&);

GOAS_INSTANTIATE(float)
GOAS_INSTANTIATE(double)

#undef GOAS_INSTANTIATE

}  // namespace goas

#include "stvae/vae_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stvae::vae {

using nlohmann::json;

namespace {

json tensor_json(const nn::Tensor& t) {
  return json{{"shape", t.shape()}, {"data", t.vec()}};
}

nn::Tensor tensor_from_json(const json& j, const std::string& name) {
  if (!j.contains("shape") || !j.contains("data")) {
    throw std::runtime_error("model file: layer '" + name + "' is missing shape or data");
  }
  std::vector<int> shape = j.at("shape").get<std::vector<int>>();
  std::vector<double> data = j.at("data").get<std::vector<double>>();
  std::size_t expect = 1;
  for (int e : shape) expect *= static_cast<std::size_t>(std::max(e, 0));
  if (expect != data.size()) {
    throw std::runtime_error("model file: layer '" + name + "' declares " +
                             std::to_string(expect) + " values but carries " +
                             std::to_string(data.size()));
  }
  return nn::Tensor(std::move(shape), std::move(data));
}

std::vector<double> vec_from_json(const json& j, const std::string& name, std::size_t want) {
  std::vector<double> v = j.get<std::vector<double>>();
  if (v.size() != want) {
    throw std::runtime_error("model file: bias '" + name + "' has length " +
                             std::to_string(v.size()) + ", expected " + std::to_string(want));
  }
  return v;
}

}  // namespace

std::string serialize_model(const VaeModel& model, const std::vector<EpochStats>& history,
                            int best_epoch) {
  json j;
  j["format"] = "stvae-model";
  j["format_version"] = kModelFormatVersion;
  j["arch"] = {{"latent_dim", model.arch.latent_dim},
               {"extent", model.arch.extent},
               {"conv1_channels", model.arch.conv1_channels},
               {"conv2_channels", model.arch.conv2_channels}};
  j["normalization"] = {{"lower", model.norm_lower}, {"upper", model.norm_upper}};
  j["sigma2"] = model.sigma2;
  j["weights"] = {{"enc_w1", tensor_json(model.enc_w1)}, {"enc_b1", model.enc_b1},
                  {"enc_w2", tensor_json(model.enc_w2)}, {"enc_b2", model.enc_b2},
                  {"enc_wd", tensor_json(model.enc_wd)}, {"enc_bd", model.enc_bd},
                  {"dec_wd", tensor_json(model.dec_wd)}, {"dec_bd", model.dec_bd},
                  {"dec_w1", tensor_json(model.dec_w1)}, {"dec_b1", model.dec_b1},
                  {"dec_w2", tensor_json(model.dec_w2)}, {"dec_b2", model.dec_b2}};
  if (!history.empty()) {
    json h = json::array();
    for (const auto& e : history) {
      h.push_back({{"train_total", e.train_total},
                   {"train_reconstruction", e.train_reconstruction},
                   {"train_mmd", e.train_mmd},
                   {"val_total", e.val_total},
                   {"val_reconstruction", e.val_reconstruction},
                   {"val_mmd", e.val_mmd}});
    }
    j["history"] = std::move(h);
    j["best_epoch"] = best_epoch;
  }
  return j.dump();
}

LoadedModel deserialize_model(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("model file: not valid JSON (") + e.what() + ")");
  }
  if (j.value("format", "") != "stvae-model") {
    throw std::runtime_error("model file: missing or wrong format tag");
  }
  if (j.value("format_version", -1) != kModelFormatVersion) {
    throw std::runtime_error("model file: unsupported format_version " +
                             j.value("format_version", json()).dump());
  }

  LoadedModel out;
  VaeModel& m = out.model;
  const json& a = j.at("arch");
  m.arch.latent_dim = a.at("latent_dim").get<int>();
  m.arch.extent = a.at("extent").get<int>();
  m.arch.conv1_channels = a.at("conv1_channels").get<int>();
  m.arch.conv2_channels = a.at("conv2_channels").get<int>();
  m.arch.validate();
  m.norm_lower = j.at("normalization").at("lower").get<double>();
  m.norm_upper = j.at("normalization").at("upper").get<double>();
  m.sigma2 = j.at("sigma2").get<double>();

  const json& w = j.at("weights");
  const int c1 = m.arch.conv1_channels, c2 = m.arch.conv2_channels;
  const int k = m.arch.latent_dim, flat = m.arch.flat_dim();
  m.enc_w1 = tensor_from_json(w.at("enc_w1"), "enc_w1");
  m.enc_b1 = vec_from_json(w.at("enc_b1"), "enc_b1", c1);
  m.enc_w2 = tensor_from_json(w.at("enc_w2"), "enc_w2");
  m.enc_b2 = vec_from_json(w.at("enc_b2"), "enc_b2", c2);
  m.enc_wd = tensor_from_json(w.at("enc_wd"), "enc_wd");
  m.enc_bd = vec_from_json(w.at("enc_bd"), "enc_bd", k);
  m.dec_wd = tensor_from_json(w.at("dec_wd"), "dec_wd");
  m.dec_bd = vec_from_json(w.at("dec_bd"), "dec_bd", flat);
  m.dec_w1 = tensor_from_json(w.at("dec_w1"), "dec_w1");
  m.dec_b1 = vec_from_json(w.at("dec_b1"), "dec_b1", c1);
  m.dec_w2 = tensor_from_json(w.at("dec_w2"), "dec_w2");
  m.dec_b2 = vec_from_json(w.at("dec_b2"), "dec_b2", 1);

  auto expect_shape = [](const nn::Tensor& t, std::vector<int> shape, const char* name) {
    if (t.shape() != shape) {
      throw std::runtime_error(std::string("model file: '") + name + "' has shape " +
                               t.shape_str() + ", inconsistent with arch");
    }
  };
  expect_shape(m.enc_w1, {3, 3, 1, c1}, "enc_w1");
  expect_shape(m.enc_w2, {3, 3, c1, c2}, "enc_w2");
  expect_shape(m.enc_wd, {k, flat}, "enc_wd");
  expect_shape(m.dec_wd, {flat, k}, "dec_wd");
  expect_shape(m.dec_w1, {3, 3, c1, c2}, "dec_w1");
  expect_shape(m.dec_w2, {3, 3, 1, c1}, "dec_w2");

  if (j.contains("history")) {
    for (const auto& e : j.at("history")) {
      EpochStats s;
      s.train_total = e.at("train_total").get<double>();
      s.train_reconstruction = e.at("train_reconstruction").get<double>();
      s.train_mmd = e.at("train_mmd").get<double>();
      s.val_total = e.at("val_total").get<double>();
      s.val_reconstruction = e.at("val_reconstruction").get<double>();
      s.val_mmd = e.at("val_mmd").get<double>();
      out.history.push_back(s);
    }
    out.best_epoch = j.value("best_epoch", -1);
  }
  return out;
}

void save_model_file(const std::string& path, const VaeModel& model,
                     const std::vector<EpochStats>& history, int best_epoch) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file for writing: " + path);
  f << serialize_model(model, history, best_epoch);
  if (!f) throw std::runtime_error("failed writing model file: " + path);
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace stvae::vae

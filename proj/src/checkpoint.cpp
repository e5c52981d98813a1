#include "panap/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace panap {
namespace {

constexpr char kMagic[8] = {'P', 'A', 'N', 'A', 'P', 'C', 'K', '1'};

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
  uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

const nlohmann::json& need(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    data_error(std::string("checkpoint metadata missing field: ") + key);
  return *it;
}

nlohmann::json fields_meta(const std::vector<MetaField>& fields) {
  nlohmann::json out = nlohmann::json::array();
  for (const MetaField& f : fields) {
    out.push_back({{"name", f.name},
                   {"one_hot", f.one_hot},
                   {"dim", f.dim},
                   {"slot", f.slot},
                   {"values", f.vocab.values()}});
  }
  return out;
}

void verify_fields(const std::vector<MetaField>& fields,
                   const nlohmann::json& meta, const char* which) {
  if (!meta.is_array() || meta.size() != fields.size())
    data_error(std::string("checkpoint vocab mismatch: ") + which +
               " field count differs; was the data directory changed?");
  for (size_t i = 0; i < fields.size(); ++i) {
    const MetaField& f = fields[i];
    const nlohmann::json& m = meta[i];
    bool ok = need(m, "name").get<std::string>() == f.name &&
              need(m, "one_hot").get<bool>() == f.one_hot &&
              need(m, "dim").get<int>() == f.dim &&
              need(m, "values").get<std::vector<std::string>>() ==
                  f.vocab.values();
    if (!ok)
      data_error(std::string("checkpoint vocab mismatch: ") + which + " field " +
                 f.name + "; was the data directory changed?");
  }
}

}  // namespace

nlohmann::json checkpoint_meta(const PanapModel& model) {
  const ModelConfig& c = model.config();
  const EncoderSpec& e = model.encoder().spec();
  nlohmann::json j;
  j["format"] = "panap-checkpoint";
  j["version"] = 1;
  j["seed"] = model.init_seed();
  j["adam_step"] = model.store().step();
  j["model"] = {{"d", c.d},
                {"d_J", c.d_J},
                {"d_U", c.d_U},
                {"d_s", c.d_s},
                {"d_q", c.d_q},
                {"meta_embed_dim", c.meta_embed_dim},
                {"onehot_cardinality_cap", c.onehot_cardinality_cap},
                {"fc_hidden", c.fc_hidden},
                {"attention", attention_name(c.attention)},
                {"dropout", c.dropout},
                {"l2", c.l2},
                {"temperature", c.temperature},
                {"leaky_slope", c.leaky_slope},
                {"flags",
                 {{"use_content", c.flags.use_content},
                  {"use_job_meta", c.flags.use_job_meta},
                  {"use_seeker_meta", c.flags.use_seeker_meta},
                  {"use_job_id_embedding", c.flags.use_job_id_embedding}}}};
  j["encoder"] = {
      {"kind", e.kind == EncoderKind::hashed_bow ? "hashed_bow" : "external_file"},
      {"d", e.d},
      {"hash_seed", e.hash_seed},
      {"external_path", e.external_path},
      {"idf", e.idf}};
  j["vocab"] = {{"jobs", model.job_ids()},
                {"users", model.user_ids()},
                {"job_fields", fields_meta(model.job_fields())},
                {"seeker_fields", fields_meta(model.seeker_fields())}};
  return j;
}

void save_checkpoint(const std::string& path, const PanapModel& model,
                     const nlohmann::json& extra_meta) {
  nlohmann::json meta = checkpoint_meta(model);
  for (const auto& [k, v] : extra_meta.items()) meta[k] = v;
  std::string js = meta.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) io_error("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 8);
  put_u64(os, js.size());
  os.write(js.data(), static_cast<std::streamsize>(js.size()));
  const auto& slots = model.store().slots();
  put_u64(os, slots.size());
  for (const auto& [name, slot] : slots) {
    put_u32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(os, static_cast<uint32_t>(slot.value.shape.size()));
    for (int64_t d : slot.value.shape) put_u64(os, static_cast<uint64_t>(d));
    for (double x : slot.value.v) put_f64(os, x);
  }
  if (!os) io_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) io_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    data_error("not a checkpoint file: " + path);

  uint64_t json_len = get_u64(is);
  std::string js(json_len, '\0');
  is.read(js.data(), static_cast<std::streamsize>(json_len));
  if (!is) data_error("truncated checkpoint metadata: " + path);

  Checkpoint ck;
  try {
    ck.meta = nlohmann::json::parse(js);
  } catch (const nlohmann::json::exception& e) {
    data_error("bad checkpoint metadata: " + std::string(e.what()));
  }

  uint64_t n_tensors = get_u64(is);
  for (uint64_t t = 0; t < n_tensors; ++t) {
    uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    uint32_t ndim = get_u32(is);
    if (!is || ndim > 2)
      data_error("bad tensor header in checkpoint: " + path);
    Tensor tensor;
    int64_t numel = 1;
    for (uint32_t d = 0; d < ndim; ++d) {
      int64_t dim = static_cast<int64_t>(get_u64(is));
      if (dim < 0 || dim > (1LL << 32))
        data_error("bad tensor dimension in checkpoint: " + path);
      tensor.shape.push_back(dim);
      numel *= dim;
    }
    tensor.v.resize(static_cast<size_t>(numel));
    for (int64_t i = 0; i < numel; ++i) tensor.v[static_cast<size_t>(i)] = get_f64(is);
    if (!is) data_error("truncated checkpoint tensor: " + name);
    ck.tensors.emplace(std::move(name), std::move(tensor));
  }
  return ck;
}

ModelConfig model_config_from_meta(const nlohmann::json& meta) {
  try {
    const nlohmann::json& m = need(meta, "model");
    ModelConfig c;
    c.d = need(m, "d").get<int>();
    c.d_J = need(m, "d_J").get<int>();
    c.d_U = need(m, "d_U").get<int>();
    c.d_s = need(m, "d_s").get<int>();
    c.d_q = need(m, "d_q").get<int>();
    c.meta_embed_dim = need(m, "meta_embed_dim").get<int>();
    c.onehot_cardinality_cap = need(m, "onehot_cardinality_cap").get<int>();
    c.fc_hidden = need(m, "fc_hidden").get<int>();
    c.attention = parse_attention(need(m, "attention").get<std::string>());
    c.dropout = need(m, "dropout").get<double>();
    c.l2 = need(m, "l2").get<double>();
    c.temperature = need(m, "temperature").get<double>();
    c.leaky_slope = need(m, "leaky_slope").get<double>();
    const nlohmann::json& f = need(m, "flags");
    c.flags.use_content = need(f, "use_content").get<bool>();
    c.flags.use_job_meta = need(f, "use_job_meta").get<bool>();
    c.flags.use_seeker_meta = need(f, "use_seeker_meta").get<bool>();
    c.flags.use_job_id_embedding = need(f, "use_job_id_embedding").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    data_error("bad checkpoint model config: " + std::string(e.what()));
  }
}

EncoderSpec encoder_spec_from_meta(const nlohmann::json& meta) {
  try {
    const nlohmann::json& m = need(meta, "encoder");
    EncoderSpec spec;
    std::string kind = need(m, "kind").get<std::string>();
    if (kind == "hashed_bow") {
      spec.kind = EncoderKind::hashed_bow;
    } else if (kind == "external_file") {
      spec.kind = EncoderKind::external_file;
    } else {
      data_error("bad checkpoint encoder kind: " + kind);
    }
    spec.d = need(m, "d").get<int>();
    spec.hash_seed = need(m, "hash_seed").get<uint64_t>();
    spec.external_path = need(m, "external_path").get<std::string>();
    spec.idf = need(m, "idf").get<std::map<std::string, double>>();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    data_error("bad checkpoint encoder config: " + std::string(e.what()));
  }
}

uint64_t seed_from_meta(const nlohmann::json& meta) {
  try {
    return need(meta, "seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    data_error("bad checkpoint seed: " + std::string(e.what()));
  }
}

void restore_into_model(PanapModel& model, const Checkpoint& ck) {
  try {
    const nlohmann::json& vocab = need(ck.meta, "vocab");
    if (need(vocab, "jobs").get<std::vector<std::string>>() != model.job_ids())
      data_error("checkpoint vocab mismatch: job list differs; was the data "
                 "directory changed?");
    if (need(vocab, "users").get<std::vector<std::string>>() !=
        model.user_ids())
      data_error("checkpoint vocab mismatch: user list differs; was the data "
                 "directory changed?");
    verify_fields(model.job_fields(), need(vocab, "job_fields"), "job");
    verify_fields(model.seeker_fields(), need(vocab, "seeker_fields"),
                  "seeker");
  } catch (const nlohmann::json::exception& e) {
    data_error("bad checkpoint vocab block: " + std::string(e.what()));
  }

  auto& slots = model.store_mut().slots_mut();
  for (const auto& [name, tensor] : ck.tensors)
    if (!slots.count(name))
      data_error("checkpoint has unknown tensor: " + name);
  for (auto& [name, slot] : slots) {
    auto it = ck.tensors.find(name);
    if (it == ck.tensors.end())
      data_error("checkpoint missing tensor: " + name);
    if (!(it->second.shape == slot.value.shape))
      data_error("checkpoint tensor shape mismatch for " + name + ": " +
                 it->second.shape_str() + " vs " + slot.value.shape_str());
    slot.value = it->second;
  }
  int64_t step = 0;
  try {
    step = need(ck.meta, "adam_step").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    data_error("bad checkpoint adam_step: " + std::string(e.what()));
  }
  model.store_mut().set_step(step);
}

}  // namespace panap

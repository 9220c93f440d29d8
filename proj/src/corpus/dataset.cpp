#include "crasp/corpus/dataset.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <memory>
#include <thread>
#include <vector>

#include "json.hpp"

namespace crasp::corpus {

namespace {

using Json = nlohmann::ordered_json;

struct Sha256 {
  Sha256() : ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  void update(std::string_view s) { EVP_DigestUpdate(ctx.get(), s.data(), s.size()); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &n);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned k = 0; k < n; ++k) {
      out += digits[md[k] >> 4];
      out += digits[md[k] & 15];
    }
    return out;
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

std::string record_line(const CorpusRecord& r, LineFormat f) {
  if (f == LineFormat::Plain) return r.joined();
  const auto& m = r.meta;
  Json meta{{"task", task_name(m.task)},
            {"format", format_name(m.format)},
            {"length", m.length},
            {"seed", m.seed},
            {"index", m.index},
            {"o_p", m.position_offset},
            {"o_c", m.signpost_offset},
            {"repetitive", m.repetitive},
            {"split", split_name(m.split)}};
  Json j{{"prompt", r.prompt}, {"trace", r.trace}, {"answer", r.answer}, {"meta", meta}};
  return j.dump();
}

CorpusRecord record_from_json(std::string_view line) {
  try {
    auto j = Json::parse(line);
    CorpusRecord r;
    r.prompt = j.at("prompt").get<std::string>();
    r.trace = j.at("trace").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    const auto& m = j.at("meta");
    auto task = parse_task(m.at("task").get<std::string>());
    auto format = parse_format(m.at("format").get<std::string>());
    auto split = parse_split(m.at("split").get<std::string>());
    if (!task || !format || !split) throw Error("unknown task, format or split");
    r.meta.task = *task;
    r.meta.format = *format;
    r.meta.split = *split;
    r.meta.length = m.at("length").get<std::size_t>();
    r.meta.seed = m.at("seed").get<std::uint64_t>();
    r.meta.index = m.at("index").get<std::uint64_t>();
    r.meta.position_offset = m.at("o_p").get<std::uint64_t>();
    r.meta.signpost_offset = m.at("o_c").get<std::uint64_t>();
    r.meta.repetitive = m.at("repetitive").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed record: ") + e.what());
  }
}

DatasetSummary gen_dataset(const TaskConfig& cfg, std::size_t count, std::ostream& sink, LineFormat f,
                           std::size_t jobs) {
  cfg.validate();
  if (count == 0) throw Error("count must be >= 1");
  jobs = std::max<std::size_t>(1, jobs);
  DatasetSummary sum;
  sum.seed = cfg.seed;
  sum.count = count;
  Sha256 hash;

  constexpr std::size_t kChunk = 256;
  struct Slot {
    std::string text;
    std::vector<std::size_t> lengths;
  };
  // Workers fill a window of chunks; the writer drains it in index order.
  const std::size_t window = jobs * 2;
  for (std::size_t base = 0; base < count; base += window * kChunk) {
    std::size_t chunks = std::min(window, (count - base + kChunk - 1) / kChunk);
    std::vector<Slot> slots(chunks);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t c; (c = next++) < chunks;) {
        std::size_t lo = base + c * kChunk, hi = std::min(count, lo + kChunk);
        for (std::size_t k = lo; k < hi; ++k) {
          auto r = gen_record(cfg, k);
          slots[c].text += record_line(r, f);
          slots[c].text += '\n';
          slots[c].lengths.push_back(r.meta.length);
        }
      }
    };
    if (jobs == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t j = 0; j < std::min(jobs, chunks); ++j) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    for (auto& s : slots) {
      sink.write(s.text.data(), static_cast<std::streamsize>(s.text.size()));
      if (!sink) throw SinkError("write to dataset sink failed");
      hash.update(s.text);
      for (auto n : s.lengths) ++sum.per_length[n];
    }
  }
  sink.flush();
  if (!sink) throw SinkError("flush of dataset sink failed");
  sum.sha256 = hash.hex();
  return sum;
}

}  // namespace crasp::corpus

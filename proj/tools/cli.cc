// Copyright 2026 The lsscore Authors.
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

#include "cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lsscore/corpus.h"
#include "lsscore/encoder.h"
#include "lsscore/error.h"
#include "lsscore/harness.h"
#include "lsscore/negatives.h"
#include "lsscore/random.h"
#include "lsscore/scoring.h"
#include "lsscore/synthetic.h"
#include "lsscore/text.h"
#include "lsscore/trainer.h"

namespace lsscore::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr size_t kDefaultVocabSize = 8000;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Output stream that is either a file or the given fallback.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw DataError("cannot write " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : fallback_; }
  void Close() {
    if (file_.is_open()) {
      file_.close();
      if (file_.fail()) throw DataError("failed writing output file");
    }
  }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

fs::path VocabPathFor(const std::string& explicit_path, const std::string& weights) {
  return explicit_path.empty() ? fs::path(weights + ".vocab") : fs::path(explicit_path);
}

std::vector<std::string> CorpusTexts(const std::vector<DocRefPair>& pairs) {
  std::vector<std::string> texts;
  texts.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    texts.push_back(p.document);
    texts.push_back(p.reference);
  }
  return texts;
}

ordered_json BreakdownJson(const ScoreBreakdown& s) {
  ordered_json j;
  j["l_score"] = s.l_score;
  j["s_score"] = s.s_score;
  j["ls_score"] = s.ls_score;
  return j;
}

// Encoder settings from the optional "encoder" object of a train config.
EncoderConfig EncoderFromTrainJson(const std::string& text, size_t vocab_size) {
  EncoderConfig enc;
  enc.vocab_size = vocab_size;
  auto j = nlohmann::json::parse(text);
  if (j.contains("encoder")) {
    nlohmann::json e = j.at("encoder");
    if (!e.is_object()) throw ConfigError("train config: encoder must be an object");
    e["vocab_size"] = vocab_size;
    for (const char* key : {"layers", "hidden", "heads", "ff", "max_positions"}) {
      if (!e.contains(key)) {
        e[key] = key == std::string("layers")   ? enc.layers
                 : key == std::string("hidden") ? enc.hidden
                 : key == std::string("heads")  ? enc.heads
                 : key == std::string("ff")     ? enc.ff
                                                : enc.max_positions;
      }
    }
    if (!e.contains("dropout")) e["dropout"] = enc.dropout;
    enc = EncoderConfig::FromJson(e.dump());
  }
  enc.Validate();
  return enc;
}

size_t VocabSizeFromTrainJson(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  auto it = j.find("vocab_size");
  if (it == j.end()) return kDefaultVocabSize;
  if (!it->is_number_unsigned()) throw ConfigError("train config: vocab_size must be an integer");
  return it->get<size_t>();
}

struct Options {
  // shared
  std::optional<uint64_t> seed;
  size_t threads = 0;
  std::string vocab;
  std::string weights;
  std::string out;
  // build-vocab
  std::string corpus;
  size_t max_size = kDefaultVocabSize;
  // pairs / rated inputs
  std::string pairs;
  std::string rated;
  // train
  std::string config;
  std::string log;
  // score
  std::optional<std::string> doc, summary;
  double alpha = ScoreWeights{}.alpha;
  double beta = ScoreWeights{}.beta;
  // eval-corr
  std::string metrics = "ls,cosdoc,rouge1,rouge2,rougel";
  // synth
  size_t count = 250;
};

int BuildVocab(const Options& o, std::ostream& out, std::ostream&) {
  const auto pairs = LoadPairs(o.corpus);
  Vocab vocab = Vocab::Build(CorpusTexts(pairs), o.max_size);
  vocab.Save(o.out);
  out << "wrote " << vocab.size() << " tokens to " << o.out << '\n';
  return kOk;
}

int GenNegatives(const Options& o, std::ostream& out, std::ostream& err) {
  const auto pairs = LoadPairs(o.pairs);
  const uint64_t master = o.seed.value_or(0);
  Sink sink(o.out, out);
  size_t failed = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    NegativeSet set;
    try {
      set = GenerateSet(p.reference, p.document, DeriveSeed(master, {i}), p.id);
    } catch (const NegativeError& e) {
      err << "skipping " << p.id << ": " << e.what() << '\n';
      ++failed;
      continue;
    }
    for (const auto& s : set.samples) {
      ordered_json j;
      j["summary_id"] = s.source_id;
      j["kind"] = KindName(s.kind);
      j["seed"] = s.seed;
      j["text"] = s.text;
      sink.get() << j.dump() << '\n';
    }
  }
  sink.Close();
  if (failed == pairs.size() && !pairs.empty()) throw DataError("no pair produced negatives");
  return kOk;
}

int TrainCommand(const Options& o, std::ostream& out, std::ostream& err) {
  const auto pairs = LoadPairs(o.pairs);
  const std::string config_text = ReadFile(o.config);
  TrainConfig config = TrainConfig::FromJson(config_text);
  if (o.seed) config.seed = *o.seed;
  if (o.threads) config.threads = o.threads;

  const fs::path vocab_path = VocabPathFor(o.vocab, o.out);
  std::optional<Vocab> vocab;
  if (!o.vocab.empty() && fs::exists(vocab_path)) {
    vocab = Vocab::Load(vocab_path);
  } else {
    vocab = Vocab::Build(CorpusTexts(pairs), VocabSizeFromTrainJson(config_text));
    vocab->Save(vocab_path);
  }
  const EncoderConfig encoder = EncoderFromTrainJson(config_text, vocab->size());

  Sink log(o.log, err);
  TrainResult result = Train(pairs, *vocab, encoder, config, [&](const EpochReport& r) {
    if (!o.log.empty()) log.get() << r.ToJson() << '\n';
    err << "epoch " << r.epoch << ": train_loss=" << r.train_loss
        << " validation_loss=" << r.validation_loss << " accuracy=" << r.accuracy << '\n';
  });
  log.Close();
  SaveParams(result.best, o.out);
  out << "best epoch " << result.best_epoch << ", weights written to " << o.out << '\n';
  return kOk;
}

int ScoreCommand(const Options& o, std::ostream& out, std::ostream&) {
  const Vocab vocab = Vocab::Load(VocabPathFor(o.vocab, o.weights));
  const EncoderParams<float> params = LoadParams(o.weights);
  if (params.config.vocab_size != vocab.size()) {
    throw DataError("weights expect a vocabulary of " + std::to_string(params.config.vocab_size) +
                    " tokens, got " + std::to_string(vocab.size()));
  }
  const ScoreWeights weights{o.alpha, o.beta};
  if (o.doc || o.summary) {
    if (!o.doc || !o.summary) throw CLI::RequiredError("--doc and --summary go together");
    out << BreakdownJson(ScoreSummary(params, vocab, *o.doc, *o.summary, weights)).dump() << '\n';
    return kOk;
  }
  if (o.pairs.empty()) throw CLI::RequiredError("--doc/--summary or --pairs");
  for (const auto& p : LoadPairs(o.pairs)) {
    ordered_json j;
    j["id"] = p.id;
    const ordered_json scores =
        BreakdownJson(ScoreSummary(params, vocab, p.document, p.reference, weights));
    for (const auto& [k, v] : scores.items()) j[k] = v;
    out << j.dump() << '\n';
  }
  return kOk;
}

int EvalCorr(const Options& o, std::ostream& out, std::ostream&) {
  const auto rated = LoadRated(o.rated);
  const auto metrics = ParseMetricList(o.metrics);
  std::vector<DocRefPair> pairs;
  if (!o.pairs.empty()) pairs = LoadPairs(o.pairs);
  const auto documents = DocumentsById(pairs);
  const auto references = ReferencesById(pairs);

  std::optional<Vocab> vocab;
  std::optional<EncoderParams<float>> params;
  CorrelationInputs in;
  in.threads = o.threads;
  in.weights = {o.alpha, o.beta};
  in.documents = &documents;
  if (!pairs.empty()) in.references = &references;
  if (!o.weights.empty()) {
    vocab = Vocab::Load(VocabPathFor(o.vocab, o.weights));
    params = LoadParams(o.weights);
    if (params->config.vocab_size != vocab->size()) {
      throw DataError("weights and vocabulary sizes differ");
    }
    in.params = &*params;
    in.vocab = &*vocab;
  }
  const CorrelationTable table = EvaluateCorrelations(rated, metrics, in);
  Sink sink(o.out, out);
  table.WriteCsv(sink.get());
  sink.Close();
  return kOk;
}

int InspectWeights(const Options& o, std::ostream& out, std::ostream&) {
  const EncoderParams<float> params = LoadParams(o.weights);
  out << "config " << params.config.ToJson() << '\n';
  out << "parameters " << params.ParameterCount() << '\n';
  ForEachTensor(params, [&](const std::string& name, const Matrix<float>& m) {
    out << std::left << std::setw(28) << name << ' ' << m.rows() << 'x' << m.cols()
        << " norm=" << std::setprecision(6) << m.cast<double>().norm() << '\n';
  });
  return kOk;
}

int SynthCorpus(const Options& o, std::ostream& out, std::ostream&) {
  Sink sink(o.out, out);
  WritePairs(sink.get(), GenerateSyntheticCorpus(o.count, o.seed.value_or(0)));
  sink.Close();
  return kOk;
}

int SynthRated(const Options& o, std::ostream& out, std::ostream&) {
  const auto pairs = LoadPairs(o.pairs);
  Sink sink(o.out, out);
  WriteRated(sink.get(), BuildOrderedRatedSet(pairs, o.seed.value_or(0)));
  sink.Close();
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-free summary quality scoring with contrastive training", "lsscore"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Master seed");
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "Worker threads (default: all cores)");
  };

  auto* build_vocab = app.add_subcommand("build-vocab", "Build a vocabulary from a pair corpus");
  build_vocab->add_option("--corpus", o.corpus, "Pair JSONL")->required();
  build_vocab->add_option("--max-size", o.max_size, "Vocabulary size including reserved tokens");
  build_vocab->add_option("--out", o.out, "Vocabulary file")->required();

  auto* gen = app.add_subcommand("gen-negatives", "Write one negative per kind for every pair");
  gen->add_option("--pairs", o.pairs, "Pair JSONL")->required();
  gen->add_option("--out", o.out, "Output JSONL (default: stdout)");
  add_seed(gen);

  auto* train = app.add_subcommand("train", "Contrastive training");
  train->add_option("--pairs", o.pairs, "Pair JSONL")->required();
  train->add_option("--config", o.config, "Train config JSON")->required();
  train->add_option("--out", o.out, "Weights file")->required();
  train->add_option("--log", o.log, "Epoch report JSONL");
  train->add_option("--vocab", o.vocab, "Vocabulary file; built from the pairs if missing "
                                       "(default: <out>.vocab)");
  add_seed(train);
  add_threads(train);

  auto* score = app.add_subcommand("score", "Score summaries against their documents");
  score->add_option("--weights", o.weights, "Weights file")->required();
  score->add_option("--vocab", o.vocab, "Vocabulary (default: <weights>.vocab)");
  score->add_option("--doc", o.doc, "Document text");
  score->add_option("--summary", o.summary, "Summary text");
  score->add_option("--pairs", o.pairs, "Pair JSONL; scores each reference");
  score->add_option("--alpha", o.alpha, "Linguistic weight");
  score->add_option("--beta", o.beta, "Semantic weight");
  add_seed(score);

  auto* eval = app.add_subcommand("eval-corr", "Spearman correlation with human ratings");
  eval->add_option("--rated", o.rated, "Rated summary JSONL")->required();
  eval->add_option("--pairs", o.pairs, "Pair JSONL with documents and references");
  eval->add_option("--weights", o.weights, "Weights file (needed for ls, cosdoc)");
  eval->add_option("--vocab", o.vocab, "Vocabulary (default: <weights>.vocab)");
  eval->add_option("--metrics", o.metrics, "Comma-separated: ls,cosdoc,rouge1,rouge2,rougel");
  eval->add_option("--out", o.out, "CSV output (default: stdout)");
  eval->add_option("--alpha", o.alpha, "Linguistic weight");
  eval->add_option("--beta", o.beta, "Semantic weight");
  add_seed(eval);
  add_threads(eval);

  auto* inspect = app.add_subcommand("inspect-weights", "Print config header and tensor norms");
  inspect->add_option("--weights", o.weights, "Weights file")->required();

  auto* synth = app.add_subcommand("synth-corpus", "Generate the synthetic pair corpus");
  synth->add_option("--count", o.count, "Number of pairs");
  synth->add_option("--out", o.out, "Output JSONL (default: stdout)");
  add_seed(synth);

  auto* synth_rated = app.add_subcommand("synth-rated",
                                         "Rated set with forced quality order per reference");
  synth_rated->add_option("--pairs", o.pairs, "Pair JSONL")->required();
  synth_rated->add_option("--out", o.out, "Output JSONL (default: stdout)");
  add_seed(synth_rated);

  std::vector<const char*> argv = {"lsscore"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (app.get_subcommands().empty()) err << app.help();
    return kUsage;
  }

  try {
    if (*build_vocab) return BuildVocab(o, out, err);
    if (*gen) return GenNegatives(o, out, err);
    if (*train) return TrainCommand(o, out, err);
    if (*score) return ScoreCommand(o, out, err);
    if (*eval) return EvalCorr(o, out, err);
    if (*inspect) return InspectWeights(o, out, err);
    if (*synth) return SynthCorpus(o, out, err);
    if (*synth_rated) return SynthRated(o, out, err);
  } catch (const CLI::RequiredError& e) {
    err << "error: missing " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    // Data, config, and weight-file problems.
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  err << app.help();
  return kUsage;
}

}  // namespace lsscore::cli

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lexopt/coder.hpp"
#include "lexopt/corpus.hpp"
#include "lexopt/costs.hpp"
#include "lexopt/error.hpp"
#include "lexopt/eval.hpp"
#include "lexopt/hypotheses.hpp"
#include "lexopt/pipeline.hpp"
#include "lexopt/surprisal.hpp"

namespace py = pybind11;
using namespace lexopt;

namespace {

template <typename T, typename Writer>
std::string to_text(const T& value, Writer write) {
  std::ostringstream out;
  write(out, value);
  return out.str();
}

template <typename Reader>
auto from_text(const std::string& s, Reader read) {
  std::istringstream in(s);
  return read(in);
}

std::vector<WeightedForm> weighted_forms(const std::map<std::string, double>& weights) {
  std::vector<WeightedForm> out;
  for (const auto& [form, w] : weights) out.push_back({form, w});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Word-length predictions of communicative-efficiency hypotheses";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<DecodeError>(m, "DecodeError", data.ptr());
  py::register_exception<ParseError>(m, "ParseError", data.ptr());

  // corpus
  py::enum_<FilterProtocol>(m, "FilterProtocol")
      .value("All", FilterProtocol::All)
      .value("NoPunct", FilterProtocol::NoPunct)
      .value("AlphabetOnly", FilterProtocol::AlphabetOnly);

  py::class_<CorpusConfig>(m, "CorpusConfig")
      .def(py::init<>())
      .def_readwrite("alphabet", &CorpusConfig::alphabet)
      .def_readwrite("punctuation_set", &CorpusConfig::punctuation_set)
      .def_readwrite("filter_protocol", &CorpusConfig::filter_protocol)
      .def_readwrite("top_n_types", &CorpusConfig::top_n_types)
      .def_readwrite("lowercase", &CorpusConfig::lowercase);

  py::class_<WordRecord>(m, "WordRecord")
      .def_readonly("form", &WordRecord::form)
      .def_readonly("length", &WordRecord::length)
      .def_readonly("frequency", &WordRecord::frequency)
      .def_readonly("rel_freq", &WordRecord::rel_freq)
      .def("__repr__", [](const WordRecord& r) {
        return "WordRecord(" + r.form + ", frequency=" + std::to_string(r.frequency) + ")";
      });

  py::class_<FrequencyTable>(m, "FrequencyTable")
      .def_property_readonly("records", &FrequencyTable::records)
      .def_property_readonly("total_tokens", &FrequencyTable::total_tokens)
      .def("__len__", &FrequencyTable::size)
      .def("__contains__", [](const FrequencyTable& t, const std::string& f) { return t.contains(f); })
      .def("__getitem__",
           [](const FrequencyTable& t, const std::string& f) {
             const auto* r = t.find(f);
             if (!r) throw py::key_error(f);
             return *r;
           })
      .def("to_tsv", [](const FrequencyTable& t) { return to_text(t, write_frequency_tsv); })
      .def_static("from_tsv", [](const std::string& s) { return from_text(s, read_frequency_tsv); });

  m.def("parse_alphabet", &parse_alphabet, py::arg("text"));
  m.def("ingest_and_filter", py::overload_cast<std::string_view, const CorpusConfig&>(&ingest_and_filter),
        py::arg("text"), py::arg("config") = CorpusConfig{});
  m.def("count_frequencies", [](const std::vector<std::string>& tokens, const CorpusConfig& config) {
    return count_frequencies(tokens, config);
  }, py::arg("tokens"), py::arg("config") = CorpusConfig{});

  // surprisal
  py::class_<SurprisalSample>(m, "SurprisalSample")
      .def(py::init<double, std::uint64_t>(), py::arg("surprisal_bits"), py::arg("count") = 1)
      .def_readwrite("surprisal_bits", &SurprisalSample::surprisal_bits)
      .def_readwrite("count", &SurprisalSample::count)
      .def("__eq__", &SurprisalSample::operator==)
      .def("__repr__", [](const SurprisalSample& s) {
        return "SurprisalSample(" + std::to_string(s.surprisal_bits) + ", " + std::to_string(s.count) + ")";
      });

  py::class_<SurprisalTable>(m, "SurprisalTable")
      .def(py::init<>())
      .def("add", &SurprisalTable::add, py::arg("form"), py::arg("sample"))
      .def("add", [](SurprisalTable& t, const std::string& form, double bits, std::uint64_t count) {
        t.add(form, {bits, count});
      }, py::arg("form"), py::arg("surprisal_bits"), py::arg("count") = 1)
      .def_property_readonly("per_word", &SurprisalTable::per_word)
      .def("__len__", &SurprisalTable::size)
      .def("__eq__", &SurprisalTable::operator==)
      .def("total_occurrences", &SurprisalTable::total_occurrences)
      .def("to_tsv", [](const SurprisalTable& t) { return to_text(t, write_external); })
      .def_static("from_tsv", [](const std::string& s) { return from_text(s, ingest_external); });

  py::class_<NgramModel>(m, "NgramModel")
      .def_property_readonly("order", &NgramModel::order)
      .def_property_readonly("weights", &NgramModel::weights)
      .def_property_readonly("training_tokens", &NgramModel::training_tokens)
      .def("vocabulary", &NgramModel::vocabulary)
      .def("probability", [](const NgramModel& model, const std::string& form, const std::vector<std::string>& ctx) {
        return model.probability(form, ctx);
      }, py::arg("form"), py::arg("context") = std::vector<std::string>{});

  m.def("train_ngram", [](const std::vector<std::string>& tokens, int order, std::vector<double> weights,
                          const std::vector<std::string>& reserved) {
    return train_ngram(tokens, order, std::move(weights), reserved);
  }, py::arg("tokens"), py::arg("order"), py::arg("weights"), py::arg("reserved") = std::vector<std::string>{});
  m.def("score_corpus", [](const NgramModel& model, const std::vector<std::string>& tokens) {
    return score_corpus(model, tokens);
  }, py::arg("model"), py::arg("tokens"));
  m.def("cross_entropy", [](const NgramModel& model, const std::vector<std::string>& tokens) {
    return cross_entropy(model, tokens);
  }, py::arg("model"), py::arg("tokens"));

  // hypotheses
  py::enum_<Hypothesis>(m, "Hypothesis")
      .value("Zipf", Hypothesis::Zipf)
      .value("CchLower", Hypothesis::CchLower)
      .value("Cch", Hypothesis::Cch);

  py::class_<PredictionSet>(m, "PredictionSet")
      .def_readonly("hypothesis", &PredictionSet::hypothesis)
      .def_readonly("per_word", &PredictionSet::per_word)
      .def_readonly("config_digest", &PredictionSet::config_digest)
      .def_readonly("excluded", &PredictionSet::excluded)
      .def("to_tsv", [](const PredictionSet& p) { return to_text(p, write_predictions_tsv); });

  m.def("predict_zipf", &predict_zipf, py::arg("freq"));
  m.def("predict_cch_lower", &predict_cch_lower, py::arg("table"));
  m.def("predict_cch", &predict_cch, py::arg("table"));

  // coder
  py::class_<CodeBook>(m, "CodeBook")
      .def_readonly("k", &CodeBook::k)
      .def_readonly("code", &CodeBook::code)
      .def_readonly("expected_length", &CodeBook::expected_length)
      .def("to_tsv", [](const CodeBook& b) { return to_text(b, write_codebook_tsv); });

  m.def("build_huffman_k", [](const std::map<std::string, double>& weights, int k) {
    return build_huffman_k(weighted_forms(weights), k);
  }, py::arg("weights"), py::arg("k") = 2);
  m.def("build_huffman_k", py::overload_cast<const FrequencyTable&, int>(&build_huffman_k), py::arg("freq"),
        py::arg("k") = 2);
  m.def("roundtrip", [](const CodeBook& book, const std::vector<std::string>& words) {
    return roundtrip(book, words);
  }, py::arg("book"), py::arg("words"));
  m.def("kraft_sum", &kraft_sum, py::arg("book"));
  m.def("is_prefix_free", &is_prefix_free, py::arg("book"));

  // costs
  py::class_<CostSpec>(m, "CostSpec")
      .def(py::init([](double capacity, double lambda, Hypothesis objective) {
             CostSpec s{capacity, lambda, objective};
             s.validate();
             return s;
           }),
           py::arg("capacity"), py::arg("lam") = 1.0, py::arg("objective") = Hypothesis::Cch)
      .def_readwrite("capacity", &CostSpec::capacity)
      .def_readwrite("lam", &CostSpec::lambda)
      .def_readwrite("objective", &CostSpec::objective);

  py::class_<LengthAssignment>(m, "LengthAssignment")
      .def(py::init<>())
      .def(py::init([](std::map<std::string, double> per_word) { return LengthAssignment{std::move(per_word), {}}; }))
      .def_readwrite("per_word", &LengthAssignment::per_word)
      .def_readonly("excluded", &LengthAssignment::excluded);

  m.def("distance", &distance, py::arg("rate"), py::arg("spec"));
  m.def("objective_cost", &objective_cost, py::arg("lengths"), py::arg("table"), py::arg("freq"), py::arg("spec"));
  m.def("closed_form_cch_lengths", &closed_form_cch_lengths, py::arg("table"), py::arg("spec"));
  m.def("fit_capacity", &fit_capacity, py::arg("table"), py::arg("observed"), py::arg("freq"), py::arg("lam") = 1.0);
  m.def("optimize_lengths", &optimize_lengths, py::arg("table"), py::arg("spec"));
  m.def("observed_lengths", &observed_lengths, py::arg("freq"));
  m.def("bruteforce_lexicalization", [](const FrequencyTable& f, const SurprisalTable& t, const CostSpec& s, int k,
                                        int max_len) {
    auto r = bruteforce_lexicalization(f, t, s, k, max_len);
    return py::make_tuple(r.lengths, r.cost);
  }, py::arg("freq"), py::arg("table"), py::arg("spec"), py::arg("k") = 2, py::arg("max_len") = 6);

  // eval
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def("weighted_fit", [](const std::vector<double>& p, const std::vector<double>& l, const std::vector<double>& w) {
    const auto fit = weighted_fit(p, l, w);
    return py::make_tuple(fit.slope, fit.weighted_mse);
  }, py::arg("pred"), py::arg("obs_len"), py::arg("weight"));

  py::class_<HypothesisMetrics>(m, "HypothesisMetrics")
      .def_readonly("spearman", &HypothesisMetrics::spearman)
      .def_readonly("pearson", &HypothesisMetrics::pearson)
      .def_readonly("slope", &HypothesisMetrics::slope)
      .def_readonly("weighted_mse", &HypothesisMetrics::weighted_mse)
      .def_readonly("n_words", &HypothesisMetrics::n_words);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("per_hypothesis", &EvalReport::per_hypothesis)
      .def_readonly("config_digest", &EvalReport::config_digest)
      .def_readonly("language", &EvalReport::language)
      .def("to_json", [](const EvalReport& r) { return to_text(r, write_report_json); });

  // pipeline
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("train_path", &RunConfig::train_path)
      .def_readwrite("test_path", &RunConfig::test_path)
      .def_readwrite("external_surprisal_path", &RunConfig::external_surprisal_path)
      .def_readwrite("alphabet_path", &RunConfig::alphabet_path)
      .def_readwrite("corpus", &RunConfig::corpus)
      .def_readwrite("ngram_order", &RunConfig::ngram_order)
      .def_readwrite("ngram_weights", &RunConfig::ngram_weights)
      .def_readwrite("lambdas", &RunConfig::lambdas)
      .def_readwrite("fixed_capacity", &RunConfig::fixed_capacity)
      .def_readwrite("code_k", &RunConfig::code_k)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("language", &RunConfig::language);

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("report", &PipelineResult::report)
      .def_readonly("files", &PipelineResult::files)
      .def_readonly("capacities", &PipelineResult::capacities)
      .def_readonly("cross_entropy", &PipelineResult::cross_entropy);

  m.def("run_pipeline", &run_pipeline, py::arg("config"), py::call_guard<py::gil_scoped_release>());
}

// Command-line front end for the analysis pipeline: corpus ingestion, topic
// extraction, backbone filtering, community detection, engagement fits,
// survival analysis, ordinal modeling, and synthetic corpus generation.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include "narmine/attribution.hpp"
#include "narmine/community.hpp"
#include "narmine/corpus.hpp"
#include "narmine/csv.hpp"
#include "narmine/error.hpp"
#include "narmine/lexicon.hpp"
#include "narmine/netcore.hpp"
#include "narmine/ordinal.hpp"
#include "narmine/pipeline.hpp"
#include "narmine/survival.hpp"
#include "narmine/synthgen.hpp"
#include "narmine/tailfit.hpp"

namespace {

using namespace narmine;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    return out;
}

lexicon::TermDictionary load_dict(const std::string& path, double min_confidence) {
    lexicon::DictionaryOptions opts;
    opts.min_confidence = min_confidence;
    return lexicon::load_dictionary_file(path, opts);
}

std::map<std::string, std::string> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open labels file: " + path);
    return attribution::load_post_labels(in);
}

int run(int argc, char** argv) {
    CLI::App app{"narrative-miner: misinformation-consumption analytics pipeline"};
    app.require_subcommand(1);

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "Validate and cache a post corpus");
    std::string in_path, out_path;
    ingest->add_option("--input", in_path, "line-delimited post records")->required();
    ingest->add_option("--out", out_path, "corpus cache path")->required();
    ingest->callback([&] {
        auto c = corpus::ingest_file(in_path);
        corpus::serialize_file(c, out_path);
        auto s = corpus::summarize(c);
        std::cerr << "ingested posts=" << s.posts << " likes=" << s.likes
                  << " comments=" << s.comments << " shares=" << s.shares << "\n";
    });

    // ---- summary ----
    auto* summary = app.add_subcommand("summary", "Corpus breakdown table as CSV");
    std::string corpus_path;
    summary->add_option("--corpus", corpus_path)->required();
    summary->callback([&] {
        auto s = corpus::summarize(corpus::ingest_file(corpus_path));
        std::cout << "entity,total\n"
                  << "pages," << s.pages << "\nposts," << s.posts << "\nlikes," << s.likes
                  << "\ncomments," << s.comments << "\nshares," << s.shares << "\nlikers,"
                  << s.likers << "\ncommenters," << s.commenters << "\n";
    });

    // ---- dtm ----
    auto* dtm_cmd = app.add_subcommand("dtm", "Document-term matrix restricted to a dictionary");
    std::string dict_path, matrix_out;
    std::int64_t min_occurrences = 500;
    double min_confidence = 0.9;
    dtm_cmd->add_option("--corpus", corpus_path)->required();
    dtm_cmd->add_option("--min-occurrences", min_occurrences,
                        "keep terms with more occurrences than this");
    dtm_cmd->add_option("--dict", dict_path, "term,label[,confidence] CSV")->required();
    dtm_cmd->add_option("--min-confidence", min_confidence);
    dtm_cmd->add_option("--out", matrix_out)->required();
    dtm_cmd->callback([&] {
        auto c = corpus::ingest_file(corpus_path);
        auto dict = load_dict(dict_path, min_confidence);
        lexicon::DtmOptions opts;
        opts.min_occurrences = min_occurrences;
        opts.phrases = &dict;
        auto dtm = lexicon::restrict_to_dictionary(lexicon::build_dtm(c, opts), dict);
        lexicon::save_triplets_file(dtm, matrix_out);
        std::cerr << "dtm rows=" << dtm.n_rows() << " terms=" << dtm.n_cols() << "\n";
    });

    // ---- cooccur ----
    auto* cooccur = app.add_subcommand("cooccur", "Project the term co-occurrence network");
    std::string net_out;
    cooccur->add_option("--dtm", matrix_out)->required();
    cooccur->add_option("--out", net_out)->required();
    cooccur->callback([&] {
        auto net = netcore::project_cooccurrence(lexicon::load_triplets_file(matrix_out));
        for (const auto& w : net.warnings) std::cerr << "warning: " << w << "\n";
        netcore::save_network_file(net, net_out);
        std::cerr << "network nodes=" << net.terms.size() << " edges=" << net.edges.size()
                  << "\n";
    });

    // ---- backbone ----
    auto* backbone = app.add_subcommand("backbone", "Disparity-filter backbone");
    double alpha = 0.05;
    bool both_endpoints = false;
    backbone->add_option("--net", net_out)->required();
    backbone->add_option("--alpha", alpha);
    backbone->add_flag("--both-endpoints", both_endpoints,
                       "retain only edges significant from both endpoints");
    backbone->add_option("--out", out_path)->required();
    backbone->callback([&] {
        auto net = netcore::load_network_file(net_out);
        auto bb = netcore::extract_backbone(net, alpha,
                                            both_endpoints
                                                ? netcore::RetentionRule::kBothEndpoints
                                                : netcore::RetentionRule::kEitherEndpoint);
        netcore::save_backbone_file(bb, out_path);
        std::cerr << "backbone retained=" << bb.retained.size() << "/" << net.edges.size()
                  << " edges\n";
    });

    // ---- communities ----
    auto* communities = app.add_subcommand("communities", "Community detection on a network");
    std::string algo = "walktrap", reference_path;
    int walk_length = 4;
    communities->add_option("--net", net_out)->required();
    communities->add_option("--algo", algo)->check(
        CLI::IsMember({"walktrap", "multilevel", "fastgreedy"}));
    communities->add_option("--walk-length", walk_length);
    communities->add_option("--reference", reference_path,
                            "term,label CSV for the concordance report");
    communities->add_option("--out", out_path)->required();
    communities->callback([&] {
        auto net = netcore::load_network_file(net_out);
        auto g = net.to_graph();
        community::Partition part;
        if (algo == "walktrap")
            part = community::walktrap(g, walk_length).partition;
        else if (algo == "multilevel")
            part = community::multilevel(g);
        else
            part = community::fastgreedy(g).partition;

        std::vector<std::string>* ref_labels_ptr = nullptr;
        std::vector<std::string> ref_labels;
        if (!reference_path.empty()) {
            auto table = csv::read_file(reference_path);
            int term_col = table.require_column("term");
            int label_col = table.column("label");
            if (label_col < 0) label_col = table.require_column("reference_label");
            std::map<std::string, std::string> by_term;
            for (const auto& row : table.rows)
                by_term[row[static_cast<std::size_t>(term_col)]] =
                    row[static_cast<std::size_t>(label_col)];
            ref_labels.reserve(net.terms.size());
            for (const auto& term : net.terms) {
                auto it = by_term.find(term);
                if (it == by_term.end())
                    throw Error("reference labeling misses term '" + term + "'");
                ref_labels.push_back(it->second);
            }
            auto reference = community::partition_from_labels(ref_labels);
            std::cerr << "concordance=" << community::concordance(part, reference)
                      << " modularity=" << part.modularity << "\n";
            ref_labels_ptr = &ref_labels;
        } else {
            std::cerr << "modularity=" << part.modularity
                      << " communities=" << part.n_communities() << "\n";
        }
        community::save_partition_file(net.terms, part, ref_labels_ptr, out_path);
    });

    // ---- label-posts ----
    auto* label_posts = app.add_subcommand("label-posts", "Majority-rule topic labels");
    bool occurrence_weighted = false;
    label_posts->add_option("--corpus", corpus_path)->required();
    label_posts->add_option("--dtm", matrix_out)->required();
    label_posts->add_option("--dict", dict_path)->required();
    label_posts->add_option("--min-confidence", min_confidence);
    label_posts->add_flag("--occurrence-weighted", occurrence_weighted);
    label_posts->add_option("--out", out_path)->required();
    label_posts->callback([&] {
        auto c = corpus::ingest_file(corpus_path);
        auto dict = load_dict(dict_path, min_confidence);
        auto dtm = lexicon::load_triplets_file(matrix_out);
        attribution::LabelingOptions opts;
        opts.occurrence_weighted = occurrence_weighted;
        auto labels = attribution::label_posts(c, dtm, dict, opts);
        auto out = open_out(out_path);
        attribution::save_post_labels(labels, out);
    });

    // ---- classify-users ----
    auto* classify = app.add_subcommand("classify-users", "Polarized-user classification");
    double threshold = 0.95;
    std::string labels_path, category;
    classify->add_option("--corpus", corpus_path)->required();
    classify->add_option("--labels", labels_path, "post_id,label CSV")->required();
    classify->add_option("--threshold", threshold);
    classify->add_option("--require-category", category,
                         "restrict to users concentrated on this page category");
    classify->add_option("--out", out_path)->required();
    classify->callback([&] {
        auto c = corpus::ingest_file(corpus_path);
        attribution::ClassifyOptions opts;
        opts.threshold = threshold;
        opts.require_category = category;
        auto profiles = attribution::classify_users(c, load_labels(labels_path), opts);
        auto out = open_out(out_path);
        attribution::save_user_profiles(profiles, out);
        std::map<std::string, std::int64_t> shares;
        std::int64_t polarized = 0;
        for (const auto& [user, prof] : profiles) {
            (void)user;
            if (!prof.polarization.empty()) {
                ++shares[prof.polarization];
                ++polarized;
            }
        }
        std::cerr << "users=" << profiles.size() << " polarized=" << polarized << "\n";
        for (const auto& [topic, count] : shares)
            std::cerr << "  " << topic << "=" << count << "\n";
    });

    // ---- mobility-stats ----
    auto* mobility = app.add_subcommand("mobility-stats",
                                        "Topic correlations and engagement quartiles");
    std::string corr_out, buckets_out;
    std::int64_t min_likes = 4;
    bool polarized_only = false;
    mobility->add_option("--corpus", corpus_path)->required();
    mobility->add_option("--labels", labels_path)->required();
    mobility->add_option("--threshold", threshold);
    mobility->add_option("--min-likes", min_likes);
    mobility->add_flag("--polarized-only", polarized_only);
    mobility->add_option("--correlations-out", corr_out)->required();
    mobility->add_option("--buckets-out", buckets_out)->required();
    mobility->callback([&] {
        auto c = corpus::ingest_file(corpus_path);
        auto labels = load_labels(labels_path);
        attribution::ClassifyOptions copts;
        copts.threshold = threshold;
        auto profiles = attribution::classify_users(c, labels, copts);
        std::set<std::string> topic_set;
        for (const auto& [pid, label] : labels) {
            (void)pid;
            if (!label.empty()) topic_set.insert(label);
        }
        std::vector<std::string> topics(topic_set.begin(), topic_set.end());
        attribution::CorrelationOptions oopts;
        oopts.restrict_to_polarized = polarized_only;
        auto corr = attribution::topic_correlations(profiles, topics, oopts);
        auto out1 = open_out(corr_out);
        attribution::save_correlations(corr, out1);
        auto buckets = attribution::engagement_by_topic_count(profiles, topics, min_likes);
        auto out2 = open_out(buckets_out);
        attribution::save_engagement_buckets(buckets, out2);
    });

    // ---- fit-tail ----
    auto* fit_tail = app.add_subcommand("fit-tail", "Discrete power-law fit per group");
    std::string value_col, group_col, metric_name = "value";
    fit_tail->add_option("--input", in_path, "CSV with a value column")->required();
    fit_tail->add_option("--value-col", value_col)->required();
    fit_tail->add_option("--group-col", group_col, "optional grouping column");
    fit_tail->add_option("--metric", metric_name);
    fit_tail->add_option("--out", out_path)->required();
    fit_tail->callback([&] {
        auto table = csv::read_file(in_path);
        int vc = table.require_column(value_col);
        int gc = group_col.empty() ? -1 : table.require_column(group_col);
        std::map<std::string, std::vector<std::int64_t>> groups;
        for (const auto& row : table.rows) {
            std::string group =
                gc < 0 ? std::string("all") : row[static_cast<std::size_t>(gc)];
            std::int64_t v = std::stoll(row[static_cast<std::size_t>(vc)]);
            if (v > 0) groups[group].push_back(v);
        }
        std::vector<tailfit::FitRow> rows;
        for (const auto& [group, sample] : groups) {
            tailfit::FitRow row;
            row.group = group;
            row.metric = metric_name;
            row.fit = tailfit::fit_power_law(sample);
            if (row.fit.small_sample_warning)
                std::cerr << "warning: group '" << group << "' has fewer than 50 samples\n";
            rows.push_back(std::move(row));
        }
        auto out = open_out(out_path);
        tailfit::save_fit_rows(rows, out);
    });

    // ---- survival ----
    auto* surv = app.add_subcommand("survival", "Kaplan-Meier curves per topic");
    std::string unit_name = "post";
    std::int64_t censor_horizon = 0;
    surv->add_option("--corpus", corpus_path)->required();
    surv->add_option("--labels", labels_path)->required();
    surv->add_option("--unit", unit_name)->check(CLI::IsMember({"post", "user"}));
    surv->add_option("--censor-horizon", censor_horizon,
                     "right-censor units active within this many seconds of window end");
    surv->add_option("--out", out_path)->required();
    surv->callback([&] {
        auto c = corpus::ingest_file(corpus_path);
        auto labels = load_labels(labels_path);
        std::set<std::string> topic_set;
        for (const auto& [pid, label] : labels) {
            (void)pid;
            if (!label.empty()) topic_set.insert(label);
        }
        survival::LifetimeOptions opts;
        if (censor_horizon > 0) opts.censor_horizon = censor_horizon;
        auto unit = unit_name == "post" ? survival::LifetimeUnit::kPost
                                        : survival::LifetimeUnit::kUser;
        auto out = open_out(out_path);
        bool header = true;
        for (const auto& topic : topic_set) {
            auto sample = survival::lifetimes(c, unit, labels, topic, opts);
            survival::save_curve(topic, survival::kaplan_meier(sample), out, header);
            header = false;
        }
    });

    // ---- survtest ----
    auto* survtest = app.add_subcommand("survtest", "Gehan-Wilcoxon test across groups");
    bool exact = false, peto = false;
    survtest->add_option("--groups", in_path, "CSV: group,duration[,observed]")->required();
    survtest->add_flag("--exact", exact, "exact permutation p-value (2 groups, n <= 20)");
    survtest->add_flag("--peto", peto, "Peto-Peto weighting instead of Gehan");
    survtest->callback([&] {
        auto table = csv::read_file(in_path);
        int gc = table.require_column("group");
        int dc = table.require_column("duration");
        int oc = table.column("observed");
        std::map<std::string, survival::LifetimeSample> groups;
        for (const auto& row : table.rows) {
            auto& sample = groups[row[static_cast<std::size_t>(gc)]];
            sample.group = row[static_cast<std::size_t>(gc)];
            bool observed = oc < 0 || row[static_cast<std::size_t>(oc)] != "0";
            sample.durations.emplace_back(std::stod(row[static_cast<std::size_t>(dc)]),
                                          observed);
        }
        std::vector<survival::LifetimeSample> samples;
        for (auto& [name, sample] : groups) {
            (void)name;
            samples.push_back(std::move(sample));
        }
        survival::GehanOptions opts;
        opts.exact_permutation = exact;
        opts.weighting =
            peto ? survival::TestWeighting::kPetoPeto : survival::TestWeighting::kGehan;
        auto res = survival::gehan_wilcoxon(samples, opts);
        std::cout << "statistic,chi_square,dof,p_value\n"
                  << res.statistic << ',' << res.chi_square << ',' << res.dof << ','
                  << res.p_value << "\n";
    });

    // ---- pom ----
    auto* pom = app.add_subcommand("pom", "Proportional odds model for x,y data");
    int k_categories = 4;
    pom->add_option("--input", in_path, "CSV with x,y columns")->required();
    pom->add_option("--K", k_categories)->required();
    pom->add_option("--out", out_path, "JSON report path")->required();
    pom->callback([&] {
        auto table = csv::read_file(in_path);
        int xc = table.require_column("x");
        int yc = table.require_column("y");
        std::vector<ordinal::Observation> data;
        for (const auto& row : table.rows)
            data.push_back({std::stod(row[static_cast<std::size_t>(xc)]),
                            std::stoi(row[static_cast<std::size_t>(yc)])});
        auto fit = ordinal::fit_pom(data, k_categories);
        auto orr = ordinal::odds_ratio(fit);
        auto diag = ordinal::fit_diagnostics(fit, data);
        std::vector<int> predicted, actual;
        for (const auto& obs : data) {
            predicted.push_back(ordinal::predict_category(fit, obs.x).category);
            actual.push_back(obs.y);
        }
        double delta = ordinal::absolute_distance_coefficient(predicted, actual, k_categories);

        nlohmann::json j;
        j["n"] = fit.n;
        j["coefficient"] = {{"value", fit.slope},
                            {"std_error", fit.slope_se},
                            {"t_value", fit.slope_t},
                            {"p_value", fit.slope_p}};
        nlohmann::json intercepts = nlohmann::json::array();
        for (std::size_t i = 0; i < fit.intercepts.size(); ++i)
            intercepts.push_back({{"name",
                                   std::to_string(i + 1) + "|" + std::to_string(i + 2)},
                                  {"value", fit.intercepts[i]},
                                  {"std_error", fit.intercept_se[i]},
                                  {"t_value", fit.intercept_t[i]},
                                  {"p_value", fit.intercept_p[i]}});
        j["intercepts"] = intercepts;
        j["odds_ratio"] = {{"value", orr.or_value},
                           {"ci_low", orr.ci_low},
                           {"ci_high", orr.ci_high}};
        j["absolute_distance_coefficient"] = delta;
        j["chi_square"] = {{"deviance", diag.deviance},
                           {"dof", diag.dof},
                           {"p_value", diag.p_value},
                           {"reliable", diag.reliable}};
        j["link"] = "logit(P(Y<=j)) = alpha_j - beta*x";
        auto out = open_out(out_path);
        out << j.dump(1, '\t') << "\n";
        std::cerr << "beta=" << fit.slope << " OR=" << orr.or_value << " delta=" << delta
                  << "\n";
    });

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with a ledger");
    std::string preset = "paper-shaped", out_dir;
    double scale = 0.01;
    std::uint64_t seed = 7;
    synth->add_option("--preset", preset)->check(CLI::IsMember({"paper-shaped"}));
    synth->add_option("--scale", scale);
    synth->add_option("--seed", seed);
    synth->add_option("--out", out_dir)->required();
    synth->callback([&] {
        auto spec = synthgen::paper_shaped_spec(scale, seed);
        auto generated = synthgen::generate_corpus(spec);
        synthgen::write_outputs(generated, out_dir);
        std::cerr << "posts=" << generated.ledger.totals.posts
                  << " likes=" << generated.ledger.totals.likes
                  << " comments=" << generated.ledger.totals.comments << "\n";
    });

    // ---- pipeline ----
    auto* pipe = app.add_subcommand("pipeline", "Run every stage with caching");
    pipe->set_config("--config", "", "TOML/INI config file; flags override it");
    pipeline::PipelineConfig cfg;
    pipe->add_option("--corpus", cfg.corpus_path)->required();
    pipe->add_option("--dict", cfg.dictionary_path)->required();
    pipe->add_option("--out", cfg.output_dir)->required();
    pipe->add_option("--min-occurrences", cfg.min_occurrences);
    pipe->add_option("--min-confidence", cfg.min_confidence);
    pipe->add_option("--alpha", cfg.backbone_alpha);
    pipe->add_option("--algorithms", cfg.algorithms)->delimiter(',');
    pipe->add_option("--threshold", cfg.polarization_threshold);
    pipe->add_option("--pom-min-likes", cfg.pom_min_likes);
    std::int64_t pipe_censor = 0;
    pipe->add_option("--censor-horizon", pipe_censor);
    pipe->add_option("--seed", cfg.seed);
    pipe->callback([&] {
        if (pipe_censor > 0) cfg.censor_horizon = pipe_censor;
        auto report = pipeline::run_pipeline(cfg);
        for (const auto& s : report.stages) {
            std::cerr << s.name << ": " << s.status;
            if (!s.error.empty()) std::cerr << " (" << s.error << ")";
            std::cerr << "\n";
        }
        if (!report.ok) throw Error("pipeline failed at stage " + report.failed_stage);
        std::cerr << "manifest: " << report.manifest_path << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        return e.get_exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

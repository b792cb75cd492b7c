#include "narmine/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>

#include <json.hpp>

#include "narmine/attribution.hpp"
#include "narmine/community.hpp"
#include "narmine/corpus.hpp"
#include "narmine/csv.hpp"
#include "narmine/error.hpp"
#include "narmine/lexicon.hpp"
#include "narmine/netcore.hpp"
#include "narmine/ordinal.hpp"
#include "narmine/sha256.hpp"
#include "narmine/survival.hpp"
#include "narmine/tailfit.hpp"

namespace narmine::pipeline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write file: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    fs::rename(tmp, path);
}

// Working state threaded through the stages; fields are filled lazily so a
// cache hit upstream does not force recomputation.
struct Context {
    const PipelineConfig& cfg;
    std::optional<corpus::Corpus> corpus;
    std::optional<lexicon::TermDictionary> dictionary;
    std::optional<lexicon::DocTermMatrix> dtm;  // restricted to the dictionary
    std::optional<netcore::TermNetwork> network;
    std::optional<netcore::Backbone> backbone;
    std::optional<std::map<std::string, std::string>> post_labels;
    std::optional<std::map<std::string, attribution::UserProfile>> profiles;
    std::vector<std::string> topics;

    explicit Context(const PipelineConfig& c) : cfg(c) {}

    std::string out_path(const std::string& rel) const { return cfg.output_dir + "/" + rel; }

    const corpus::Corpus& need_corpus() {
        if (!corpus) corpus = corpus::ingest_file(out_path("corpus_cache.jsonl"));
        return *corpus;
    }
    const lexicon::TermDictionary& need_dictionary() {
        if (!dictionary) {
            lexicon::DictionaryOptions opts;
            opts.min_confidence = cfg.min_confidence;
            dictionary = lexicon::load_dictionary_file(cfg.dictionary_path, opts);
        }
        topics = dictionary->label_set;
        return *dictionary;
    }
    const lexicon::DocTermMatrix& need_dtm() {
        if (!dtm) dtm = lexicon::load_triplets_file(out_path("dtm.csv"));
        return *dtm;
    }
    const netcore::TermNetwork& need_network() {
        if (!network) network = netcore::load_network_file(out_path("network.csv"));
        return *network;
    }
    const netcore::Backbone& need_backbone() {
        // Reloading a backbone CSV keeps retained edges only; recompute from
        // the full network instead so scores stay available.
        if (!backbone)
            backbone = netcore::extract_backbone(need_network(), cfg.backbone_alpha);
        return *backbone;
    }
    const std::map<std::string, std::string>& need_labels() {
        if (!post_labels) {
            std::ifstream in(out_path("post_labels.csv"));
            if (!in) throw Error("missing post labels artifact");
            post_labels = attribution::load_post_labels(in);
        }
        return *post_labels;
    }
    const std::map<std::string, attribution::UserProfile>& need_profiles() {
        if (!profiles) {
            attribution::ClassifyOptions opts;
            opts.threshold = cfg.polarization_threshold;
            profiles = attribution::classify_users(need_corpus(), need_labels(), opts);
        }
        return *profiles;
    }
};

struct StageOutput {
    std::string rel_path;
    std::string content;
};

class Runner {
public:
    Runner(Context& ctx, RunReport& report, const json& previous_manifest)
        : ctx_(ctx), report_(report), previous_(previous_manifest) {}

    // Runs or reuses one stage. `body` returns the artifacts to write.
    void stage(const std::string& name, const std::string& params,
               const std::function<std::vector<StageOutput>()>& body) {
        StageRecord rec;
        rec.name = name;
        chain_ = sha256::hex_digest(chain_ + "|" + name + "|" + params);
        rec.input_hash = chain_;

        if (failed_) {
            rec.status = "skipped";
            report_.stages.push_back(std::move(rec));
            return;
        }
        if (reusable(name, rec.input_hash, &rec.outputs)) {
            rec.status = "cached";
            report_.stages.push_back(std::move(rec));
            return;
        }
        try {
            auto outputs = body();
            for (const auto& o : outputs) {
                atomic_write(ctx_.out_path(o.rel_path), o.content);
                ArtifactRecord art;
                art.path = o.rel_path;
                art.bytes = o.content.size();
                art.sha256 = sha256::hex_digest(o.content);
                rec.outputs.push_back(std::move(art));
            }
            rec.status = "run";
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.error = e.what();
            failed_ = true;
            report_.failed_stage = name;
        }
        report_.stages.push_back(std::move(rec));
    }

    bool failed() const { return failed_; }

private:
    bool reusable(const std::string& name, const std::string& input_hash,
                  std::vector<ArtifactRecord>* outputs) const {
        if (!previous_.contains("stages")) return false;
        for (const auto& s : previous_.at("stages")) {
            if (s.value("name", "") != name) continue;
            if (s.value("input_hash", "") != input_hash) return false;
            std::string status = s.value("status", "");
            if (status != "run" && status != "cached") return false;
            std::vector<ArtifactRecord> arts;
            for (const auto& o : s.value("outputs", json::array())) {
                ArtifactRecord art;
                art.path = o.value("path", "");
                art.bytes = o.value("bytes", std::uint64_t{0});
                art.sha256 = o.value("sha256", "");
                std::string full = ctx_.out_path(art.path);
                std::error_code ec;
                if (!fs::exists(full, ec)) return false;
                if (sha256::file_digest(full) != art.sha256) return false;
                arts.push_back(std::move(art));
            }
            *outputs = std::move(arts);
            return true;
        }
        return false;
    }

    Context& ctx_;
    RunReport& report_;
    const json& previous_;
    std::string chain_ = "narmine.pipeline.v1";
    bool failed_ = false;
};

std::string render_csv(const std::function<void(std::ostream&)>& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg) {
    if (cfg.output_dir.empty()) throw ConfigError("pipeline: output_dir is required");
    fs::create_directories(cfg.output_dir);

    RunReport report;
    Context ctx(cfg);

    json previous;
    {
        std::ifstream in(ctx.out_path("manifest.json"));
        if (in) {
            try {
                previous = json::parse(in);
            } catch (const json::exception&) {
                previous = json::object();
            }
        }
    }

    Runner runner(ctx, report, previous);

    // ---- 1. ingest --------------------------------------------------------
    runner.stage("ingest", sha256::file_digest(cfg.corpus_path), [&] {
        ctx.corpus = corpus::ingest_file(cfg.corpus_path);
        std::ostringstream cache;
        corpus::serialize(*ctx.corpus, cache);
        auto summary = corpus::summarize(*ctx.corpus);
        std::string summary_csv = render_csv([&](std::ostream& out) {
            out << "entity,total\n";
            out << "pages," << summary.pages << "\nposts," << summary.posts << "\nlikes,"
                << summary.likes << "\ncomments," << summary.comments << "\nshares,"
                << summary.shares << "\nlikers," << summary.likers << "\ncommenters,"
                << summary.commenters << '\n';
        });
        return std::vector<StageOutput>{{"corpus_cache.jsonl", cache.str()},
                                        {"summary.csv", summary_csv}};
    });

    // ---- 2. dtm -----------------------------------------------------------
    runner.stage("dtm",
                 sha256::file_digest(cfg.dictionary_path) + "|" +
                     std::to_string(cfg.min_occurrences) + "|" + fmt(cfg.min_confidence),
                 [&] {
                     const auto& dict = ctx.need_dictionary();
                     lexicon::DtmOptions opts;
                     opts.min_occurrences = cfg.min_occurrences;
                     opts.phrases = &dict;
                     auto full = lexicon::build_dtm(ctx.need_corpus(), opts);
                     ctx.dtm = lexicon::restrict_to_dictionary(full, dict);
                     std::string csv = render_csv(
                         [&](std::ostream& out) { lexicon::save_triplets(*ctx.dtm, out); });
                     return std::vector<StageOutput>{{"dtm.csv", csv}};
                 });

    // ---- 3. cooccur -------------------------------------------------------
    runner.stage("cooccur", "", [&] {
        ctx.network = netcore::project_cooccurrence(ctx.need_dtm());
        const auto& dict = ctx.need_dictionary();
        for (std::size_t i = 0; i < ctx.network->terms.size(); ++i) {
            const auto* e = dict.find(ctx.network->terms[i]);
            if (e) ctx.network->labels[i] = e->label;
        }
        std::string csv =
            render_csv([&](std::ostream& out) { netcore::save_network(*ctx.network, out); });
        return std::vector<StageOutput>{{"network.csv", csv}};
    });

    // ---- 4. backbone ------------------------------------------------------
    runner.stage("backbone", fmt(cfg.backbone_alpha), [&] {
        ctx.backbone = netcore::extract_backbone(ctx.need_network(), cfg.backbone_alpha);
        std::string csv =
            render_csv([&](std::ostream& out) { netcore::save_backbone(*ctx.backbone, out); });
        return std::vector<StageOutput>{{"backbone.csv", csv}};
    });

    // ---- 5. communities ---------------------------------------------------
    std::string algos_param;
    for (const auto& a : cfg.algorithms) algos_param += a + ",";
    runner.stage("communities", algos_param, [&] {
        const auto& bb = ctx.need_backbone();
        const auto& dict = ctx.need_dictionary();
        netcore::TermNetwork retained = bb.retained_network();
        graph::WeightedGraph g = retained.to_graph();

        std::vector<std::string> reference_labels(retained.terms.size());
        for (std::size_t i = 0; i < retained.terms.size(); ++i) {
            const auto* e = dict.find(retained.terms[i]);
            reference_labels[i] = e ? e->label : "";
        }
        community::Partition reference = community::partition_from_labels(reference_labels);

        std::vector<StageOutput> outputs;
        std::string concord_csv = "algorithm,concordance,modularity,communities\n";
        for (const auto& algo : cfg.algorithms) {
            community::Partition part;
            if (algo == "walktrap")
                part = community::walktrap(g).partition;
            else if (algo == "multilevel")
                part = community::multilevel(g);
            else if (algo == "fastgreedy")
                part = community::fastgreedy(g).partition;
            else
                throw ConfigError("unknown community algorithm: " + algo);
            double agree = community::concordance(part, reference);
            concord_csv += algo + "," + fmt(agree) + "," + fmt(part.modularity) + "," +
                           std::to_string(part.n_communities()) + "\n";
            std::string csv = render_csv([&](std::ostream& out) {
                community::save_partition(retained.terms, part, &reference_labels, out);
            });
            outputs.push_back({"communities_" + algo + ".csv", std::move(csv)});
        }
        outputs.push_back({"concordance.csv", std::move(concord_csv)});
        return outputs;
    });

    // ---- 6. label-posts ---------------------------------------------------
    runner.stage("label-posts", cfg.occurrence_weighted_labels ? "occ" : "presence", [&] {
        attribution::LabelingOptions opts;
        opts.occurrence_weighted = cfg.occurrence_weighted_labels;
        ctx.post_labels = attribution::label_posts(ctx.need_corpus(), ctx.need_dtm(),
                                                   ctx.need_dictionary(), opts);
        std::string csv = render_csv(
            [&](std::ostream& out) { attribution::save_post_labels(*ctx.post_labels, out); });
        return std::vector<StageOutput>{{"post_labels.csv", csv}};
    });

    // ---- 7. classify-users -------------------------------------------------
    runner.stage("classify-users", fmt(cfg.polarization_threshold), [&] {
        attribution::ClassifyOptions opts;
        opts.threshold = cfg.polarization_threshold;
        ctx.profiles =
            attribution::classify_users(ctx.need_corpus(), ctx.need_labels(), opts);
        ctx.need_dictionary();

        std::vector<StageOutput> outputs;
        outputs.push_back({"users.csv", render_csv([&](std::ostream& out) {
                               attribution::save_user_profiles(*ctx.profiles, out);
                           })});
        auto correlations = attribution::topic_correlations(*ctx.profiles, ctx.topics);
        outputs.push_back({"correlations.csv", render_csv([&](std::ostream& out) {
                               attribution::save_correlations(correlations, out);
                           })});
        auto buckets = attribution::engagement_by_topic_count(*ctx.profiles, ctx.topics,
                                                              cfg.pom_min_likes);
        outputs.push_back({"engagement_by_topics.csv", render_csv([&](std::ostream& out) {
                               attribution::save_engagement_buckets(buckets, out);
                           })});
        return outputs;
    });

    // ---- 8. fit-tail -------------------------------------------------------
    runner.stage("fit-tail", "", [&] {
        const auto& c = ctx.need_corpus();
        const auto& labels = ctx.need_labels();
        const auto& profiles = ctx.need_profiles();
        ctx.need_dictionary();

        struct Task {
            std::string group, metric;
            std::vector<std::int64_t> sample;
        };
        std::vector<Task> tasks;
        for (const auto& topic : ctx.topics) {
            Task likes{topic, "post_likes", {}};
            Task comments{topic, "post_comments", {}};
            Task shares{topic, "post_shares", {}};
            for (const auto& p : c.posts) {
                auto it = labels.find(p.post_id);
                if (it == labels.end() || it->second != topic) continue;
                likes.sample.push_back(static_cast<std::int64_t>(p.likes.size()));
                comments.sample.push_back(static_cast<std::int64_t>(p.comments.size()));
                shares.sample.push_back(p.shares);
            }
            tasks.push_back(std::move(likes));
            tasks.push_back(std::move(comments));
            tasks.push_back(std::move(shares));
            Task ulikes{topic, "user_likes", {}};
            Task ucomments{topic, "user_comments", {}};
            for (const auto& [user, prof] : profiles) {
                (void)user;
                if (prof.polarization != topic) continue;
                ulikes.sample.push_back(prof.total_likes);
                ucomments.sample.push_back(prof.total_comments);
            }
            tasks.push_back(std::move(ulikes));
            tasks.push_back(std::move(ucomments));
        }

        // Positive samples only; a fit needs two distinct values.
        std::vector<tailfit::FitRow> rows(tasks.size());
        std::vector<std::future<void>> futs;
        std::vector<bool> ok(tasks.size(), false);
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            futs.push_back(std::async(std::launch::async, [&, i] {
                std::vector<std::int64_t> positive;
                for (auto v : tasks[i].sample)
                    if (v > 0) positive.push_back(v);
                std::set<std::int64_t> distinct(positive.begin(), positive.end());
                if (distinct.size() < 2) return;
                rows[i].group = tasks[i].group;
                rows[i].metric = tasks[i].metric;
                rows[i].fit = tailfit::fit_power_law(positive);
                ok[i] = true;
            }));
        }
        for (auto& f : futs) f.get();
        std::vector<tailfit::FitRow> kept;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (ok[i]) kept.push_back(rows[i]);
        std::string csv =
            render_csv([&](std::ostream& out) { tailfit::save_fit_rows(kept, out); });
        return std::vector<StageOutput>{{"tail_fits.csv", csv}};
    });

    // ---- 9. survival -------------------------------------------------------
    runner.stage("survival",
                 cfg.censor_horizon ? std::to_string(*cfg.censor_horizon) : "none", [&] {
                     const auto& c = ctx.need_corpus();
                     const auto& labels = ctx.need_labels();
                     survival::LifetimeOptions opts;
                     opts.censor_horizon = cfg.censor_horizon;

                     std::vector<StageOutput> outputs;
                     std::string test_csv = "unit,statistic,chi_square,dof,p_value\n";
                     for (auto unit : {survival::LifetimeUnit::kPost,
                                       survival::LifetimeUnit::kUser}) {
                         std::string unit_name =
                             unit == survival::LifetimeUnit::kPost ? "post" : "user";
                         std::vector<survival::LifetimeSample> groups;
                         std::ostringstream curves;
                         bool header = true;
                         for (const auto& topic : ctx.topics) {
                             survival::LifetimeSample sample =
                                 survival::lifetimes(c, unit, labels, topic, opts);
                             survival::SurvivalCurve curve = survival::kaplan_meier(sample);
                             survival::save_curve(topic, curve, curves, header);
                             header = false;
                             groups.push_back(std::move(sample));
                         }
                         survival::GehanResult test = survival::gehan_wilcoxon(groups);
                         test_csv += unit_name + "," + fmt(test.statistic) + "," +
                                     fmt(test.chi_square) + "," + std::to_string(test.dof) +
                                     "," + fmt(test.p_value) + "\n";
                         outputs.push_back({"survival_" + unit_name + "s.csv", curves.str()});
                     }
                     outputs.push_back({"survtest.csv", std::move(test_csv)});
                     return outputs;
                 });

    // ---- 10. pom -----------------------------------------------------------
    runner.stage("pom", std::to_string(cfg.pom_min_likes), [&] {
        const auto& profiles = ctx.need_profiles();
        const int k = static_cast<int>(ctx.topics.size());
        std::vector<ordinal::Observation> data;
        for (const auto& [user, prof] : profiles) {
            (void)user;
            if (prof.total_likes < cfg.pom_min_likes) continue;
            int topics_liked = prof.distinct_topics_liked();
            if (topics_liked < 1) continue;
            data.push_back({static_cast<double>(prof.total_likes), std::min(topics_liked, k)});
        }
        ordinal::PomFit fit = ordinal::fit_pom(data, k);
        ordinal::OddsRatioReport orr = ordinal::odds_ratio(fit);
        ordinal::Diagnostics diag = ordinal::fit_diagnostics(fit, data);

        std::vector<int> predicted, actual;
        predicted.reserve(data.size());
        for (const auto& obs : data) {
            predicted.push_back(ordinal::predict_category(fit, obs.x).category);
            actual.push_back(obs.y);
        }
        double delta = ordinal::absolute_distance_coefficient(predicted, actual, k);

        json j;
        j["n"] = fit.n;
        j["categories"] = fit.k;
        j["coefficient"] = {{"name", "likes"},
                            {"value", fit.slope},
                            {"std_error", fit.slope_se},
                            {"t_value", fit.slope_t},
                            {"p_value", fit.slope_p}};
        json intercepts = json::array();
        for (std::size_t i = 0; i < fit.intercepts.size(); ++i) {
            intercepts.push_back({{"name", std::to_string(i + 1) + "|" + std::to_string(i + 2)},
                                  {"value", fit.intercepts[i]},
                                  {"std_error", fit.intercept_se[i]},
                                  {"t_value", fit.intercept_t[i]},
                                  {"p_value", fit.intercept_p[i]}});
        }
        j["intercepts"] = intercepts;
        j["odds_ratio"] = {{"value", orr.or_value},
                           {"ci_low", orr.ci_low},
                           {"ci_high", orr.ci_high}};
        j["absolute_distance_coefficient"] = delta;
        j["chi_square"] = {{"deviance", diag.deviance},
                           {"dof", diag.dof},
                           {"p_value", diag.p_value},
                           {"reliable", diag.reliable}};
        j["log_likelihood"] = fit.log_likelihood;
        // Cumulative logits use alpha_j - beta*x so positive slopes mean more
        // engagement pushes toward more topics.
        j["link"] = "logit(P(Y<=j)) = alpha_j - beta*x";

        std::string pom_csv = "term,value,std_error,t_value,p_value\n";
        pom_csv += "likes," + fmt(fit.slope) + "," + fmt(fit.slope_se) + "," +
                   fmt(fit.slope_t) + "," + fmt(fit.slope_p) + "\n";
        for (std::size_t i = 0; i < fit.intercepts.size(); ++i) {
            pom_csv += std::to_string(i + 1) + "|" + std::to_string(i + 2) + "," +
                       fmt(fit.intercepts[i]) + "," + fmt(fit.intercept_se[i]) + "," +
                       fmt(fit.intercept_t[i]) + "," + fmt(fit.intercept_p[i]) + "\n";
        }
        return std::vector<StageOutput>{{"pom.json", j.dump(1, '\t') + "\n"},
                                        {"pom.csv", pom_csv}};
    });

    // ---- manifest + report --------------------------------------------------
    json manifest;
    manifest["config"] = {{"corpus", cfg.corpus_path},
                          {"dictionary", cfg.dictionary_path},
                          {"min_occurrences", cfg.min_occurrences},
                          {"min_confidence", cfg.min_confidence},
                          {"backbone_alpha", cfg.backbone_alpha},
                          {"algorithms", cfg.algorithms},
                          {"polarization_threshold", cfg.polarization_threshold},
                          {"pom_min_likes", cfg.pom_min_likes},
                          {"seed", cfg.seed}};
    json stages = json::array();
    for (const auto& s : report.stages) {
        json outputs = json::array();
        for (const auto& o : s.outputs)
            outputs.push_back({{"path", o.path}, {"bytes", o.bytes}, {"sha256", o.sha256}});
        stages.push_back({{"name", s.name},
                          {"status", s.status},
                          {"input_hash", s.input_hash},
                          {"outputs", outputs},
                          {"error", s.error}});
    }
    manifest["stages"] = stages;
    atomic_write(ctx.out_path("manifest.json"), manifest.dump(1, '\t') + "\n");
    report.manifest_path = ctx.out_path("manifest.json");
    report.ok = !runner.failed();
    return report;
}

}  // namespace narmine::pipeline

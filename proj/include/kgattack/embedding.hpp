#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kgattack/kg.hpp"
#include "kgattack/types.hpp"

namespace kgattack {

enum class ModelKind { TransE, DistMult, ComplEx };
enum class NormKind { L1, L2 };
enum class LossKind { MarginRanking, SoftplusLogistic };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view s);
const char* to_string(NormKind norm);
NormKind norm_kind_from_string(std::string_view s);
const char* to_string(LossKind loss);
LossKind loss_kind_from_string(std::string_view s);

using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowRef = Eigen::Ref<Eigen::RowVectorXd>;
using ConstRowRef = Eigen::Ref<const Eigen::RowVectorXd>;

// Dense entity/relation tables plus the scoring-function identity. ComplEx
// rows hold 2*dim reals laid out [real | imaginary].
struct EmbeddingModel {
    ModelKind kind = ModelKind::TransE;
    std::int32_t dim = 0;
    NormKind norm = NormKind::L1; // TransE distance only
    Table entity_vecs;
    Table relation_vecs;

    std::int32_t width() const { return kind == ModelKind::ComplEx ? 2 * dim : dim; }
    std::int32_t num_entities() const { return static_cast<std::int32_t>(entity_vecs.rows()); }
    std::int32_t num_relations() const { return static_cast<std::int32_t>(relation_vecs.rows()); }
    void check_finite() const; // throws on any non-finite value
};

// Uniform init in [-1/sqrt(dim), 1/sqrt(dim)]; TransE entity rows are then
// L2-normalized. Bitwise deterministic for a fixed seed.
EmbeddingModel init_model(const KnowledgeGraph& kg, ModelKind kind, std::int32_t dim,
                          std::uint64_t seed, NormKind norm = NormKind::L1);

// Higher is more plausible for every kind.
double score_triple(const EmbeddingModel& model, const Triple& t);

// Scores of (h, r, c) over all candidate tails c / (c, r, t) over all heads.
Eigen::VectorXd score_all_tails(const EmbeddingModel& model, EntityId h, RelationId r);
Eigen::VectorXd score_all_heads(const EmbeddingModel& model, RelationId r, EntityId t);

struct TrainConfig {
    std::int32_t dim = 100;
    std::int32_t epochs = 100;
    std::int32_t batch_size = 1024;
    double learning_rate = 0.05;
    std::int32_t negatives_per_positive = 16;
    double margin = 1.0;  // margin-ranking loss
    double l2_reg = 1e-6; // softplus-logistic loss
    LossKind loss = LossKind::MarginRanking;
    NormKind norm = NormKind::L1;
    std::uint64_t seed = 1;
    std::int32_t workers = 1;

    void validate(ModelKind kind) const;
};

LossKind default_loss(ModelKind kind);

struct TrainResult {
    EmbeddingModel model;
    std::vector<double> epoch_loss;
};

// Negative-sampling SGD. Single-worker runs are bitwise deterministic under
// the seed; multi-worker runs update without synchronization and are only
// statistically reproducible. Throws on non-finite loss.
TrainResult train(const KnowledgeGraph& kg, ModelKind kind, const TrainConfig& cfg);

// Per-example losses with analytic gradients, exposed for the finite
// difference checks. Gradients are accumulated into the g* rows.
double transe_pair_loss_grad(ConstRowRef h, ConstRowRef r, ConstRowRef t, ConstRowRef hn,
                             ConstRowRef tn, double margin, NormKind norm, RowRef gh, RowRef gr,
                             RowRef gt, RowRef ghn, RowRef gtn);
double logistic_loss_grad(ModelKind kind, ConstRowRef h, ConstRowRef r, ConstRowRef t,
                          double label, double l2_reg, RowRef gh, RowRef gr, RowRef gt);

// Raw scoring forms on plain rows (no model lookup); shared by the losses.
double score_rows(ModelKind kind, NormKind norm, ConstRowRef h, ConstRowRef r, ConstRowRef t);

} // namespace kgattack

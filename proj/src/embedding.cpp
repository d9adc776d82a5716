#include "kgattack/embedding.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "kgattack/random.hpp"
#include "kgattack/util.hpp"

namespace kgattack {

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::TransE:
        return "transe";
    case ModelKind::DistMult:
        return "distmult";
    case ModelKind::ComplEx:
        return "complex";
    }
    return "?";
}

ModelKind model_kind_from_string(std::string_view s) {
    if (s == "transe") {
        return ModelKind::TransE;
    }
    if (s == "distmult") {
        return ModelKind::DistMult;
    }
    if (s == "complex") {
        return ModelKind::ComplEx;
    }
    throw std::invalid_argument("unknown model kind: " + std::string(s));
}

const char* to_string(NormKind norm) {
    return norm == NormKind::L1 ? "l1" : "l2";
}

NormKind norm_kind_from_string(std::string_view s) {
    if (s == "l1") {
        return NormKind::L1;
    }
    if (s == "l2") {
        return NormKind::L2;
    }
    throw std::invalid_argument("unknown norm kind: " + std::string(s));
}

const char* to_string(LossKind loss) {
    return loss == LossKind::MarginRanking ? "margin" : "softplus";
}

LossKind loss_kind_from_string(std::string_view s) {
    if (s == "margin") {
        return LossKind::MarginRanking;
    }
    if (s == "softplus") {
        return LossKind::SoftplusLogistic;
    }
    throw std::invalid_argument("unknown loss kind: " + std::string(s));
}

void EmbeddingModel::check_finite() const {
    if (!entity_vecs.allFinite() || !relation_vecs.allFinite()) {
        throw std::runtime_error("embedding model contains non-finite values");
    }
}

EmbeddingModel init_model(const KnowledgeGraph& kg, ModelKind kind, std::int32_t dim,
                          std::uint64_t seed, NormKind norm) {
    if (dim < 1) {
        throw std::invalid_argument("init_model: dim must be >= 1");
    }
    EmbeddingModel model;
    model.kind = kind;
    model.dim = dim;
    model.norm = norm;
    const auto width = model.width();
    model.entity_vecs.resize(kg.entities().size(), width);
    model.relation_vecs.resize(kg.relations().size(), width);

    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    Rng rng(seed);
    auto fill = [&](Table& table) {
        for (Eigen::Index i = 0; i < table.rows(); ++i) {
            for (Eigen::Index j = 0; j < table.cols(); ++j) {
                table(i, j) = (2.0 * uniform_double01(rng) - 1.0) * scale;
            }
        }
    };
    fill(model.entity_vecs);
    fill(model.relation_vecs);

    if (kind == ModelKind::TransE) {
        model.entity_vecs.rowwise().normalize();
    }
    return model;
}

double score_rows(ModelKind kind, NormKind norm, ConstRowRef h, ConstRowRef r, ConstRowRef t) {
    switch (kind) {
    case ModelKind::TransE: {
        const Eigen::RowVectorXd diff = h + r - t;
        return norm == NormKind::L1 ? -diff.lpNorm<1>() : -diff.norm();
    }
    case ModelKind::DistMult:
        return h.cwiseProduct(r).dot(t);
    case ModelKind::ComplEx: {
        const auto d = h.size() / 2;
        const auto hre = h.head(d), him = h.tail(d);
        const auto rre = r.head(d), rim = r.tail(d);
        const auto tre = t.head(d), tim = t.tail(d);
        return hre.cwiseProduct(rre).dot(tre) + him.cwiseProduct(rre).dot(tim) +
               hre.cwiseProduct(rim).dot(tim) - him.cwiseProduct(rim).dot(tre);
    }
    }
    throw std::logic_error("score_rows: unreachable");
}

double score_triple(const EmbeddingModel& model, const Triple& t) {
    return score_rows(model.kind, model.norm, model.entity_vecs.row(t.head),
                      model.relation_vecs.row(t.relation), model.entity_vecs.row(t.tail));
}

Eigen::VectorXd score_all_tails(const EmbeddingModel& model, EntityId h, RelationId r) {
    const auto& E = model.entity_vecs;
    const Eigen::RowVectorXd hv = model.entity_vecs.row(h);
    const Eigen::RowVectorXd rv = model.relation_vecs.row(r);
    switch (model.kind) {
    case ModelKind::TransE: {
        const Eigen::RowVectorXd q = hv + rv;
        if (model.norm == NormKind::L1) {
            return -(E.rowwise() - q).cwiseAbs().rowwise().sum();
        }
        return -(E.rowwise() - q).rowwise().norm();
    }
    case ModelKind::DistMult:
        return E * hv.cwiseProduct(rv).transpose();
    case ModelKind::ComplEx: {
        const auto d = model.dim;
        const auto hre = hv.head(d), him = hv.tail(d);
        const auto rre = rv.head(d), rim = rv.tail(d);
        const Eigen::RowVectorXd a = hre.cwiseProduct(rre) - him.cwiseProduct(rim);
        const Eigen::RowVectorXd b = him.cwiseProduct(rre) + hre.cwiseProduct(rim);
        return E.leftCols(d) * a.transpose() + E.rightCols(d) * b.transpose();
    }
    }
    throw std::logic_error("score_all_tails: unreachable");
}

Eigen::VectorXd score_all_heads(const EmbeddingModel& model, RelationId r, EntityId t) {
    const auto& E = model.entity_vecs;
    const Eigen::RowVectorXd tv = model.entity_vecs.row(t);
    const Eigen::RowVectorXd rv = model.relation_vecs.row(r);
    switch (model.kind) {
    case ModelKind::TransE: {
        const Eigen::RowVectorXd q = tv - rv;
        if (model.norm == NormKind::L1) {
            return -(E.rowwise() - q).cwiseAbs().rowwise().sum();
        }
        return -(E.rowwise() - q).rowwise().norm();
    }
    case ModelKind::DistMult:
        return E * rv.cwiseProduct(tv).transpose();
    case ModelKind::ComplEx: {
        const auto d = model.dim;
        const auto tre = tv.head(d), tim = tv.tail(d);
        const auto rre = rv.head(d), rim = rv.tail(d);
        const Eigen::RowVectorXd a = rre.cwiseProduct(tre) + rim.cwiseProduct(tim);
        const Eigen::RowVectorXd b = rre.cwiseProduct(tim) - rim.cwiseProduct(tre);
        return E.leftCols(d) * a.transpose() + E.rightCols(d) * b.transpose();
    }
    }
    throw std::logic_error("score_all_heads: unreachable");
}

LossKind default_loss(ModelKind kind) {
    return kind == ModelKind::TransE ? LossKind::MarginRanking : LossKind::SoftplusLogistic;
}

void TrainConfig::validate(ModelKind kind) const {
    if (dim < 1 || epochs < 1 || batch_size < 1 || negatives_per_positive < 1 || workers < 1) {
        throw std::invalid_argument("train config: counts must be >= 1");
    }
    if (learning_rate <= 0.0 || margin <= 0.0 || l2_reg < 0.0) {
        throw std::invalid_argument("train config: rates must be positive");
    }
    if (kind == ModelKind::TransE && loss != LossKind::MarginRanking) {
        throw std::invalid_argument("train config: transe trains with the margin-ranking loss");
    }
    if (kind != ModelKind::TransE && loss != LossKind::SoftplusLogistic) {
        throw std::invalid_argument(
            "train config: distmult/complex train with the softplus-logistic loss");
    }
}

namespace {

// d|v|_p/dv for the TransE distance; L1 uses the subgradient sign(v).
Eigen::RowVectorXd distance_grad(const Eigen::RowVectorXd& diff, NormKind norm) {
    if (norm == NormKind::L1) {
        return diff.array().sign().matrix();
    }
    const double n = diff.norm();
    if (n < 1e-12) {
        return Eigen::RowVectorXd::Zero(diff.size());
    }
    return diff / n;
}

double transe_distance(const Eigen::RowVectorXd& diff, NormKind norm) {
    return norm == NormKind::L1 ? diff.lpNorm<1>() : diff.norm();
}

} // namespace

double transe_pair_loss_grad(ConstRowRef h, ConstRowRef r, ConstRowRef t, ConstRowRef hn,
                             ConstRowRef tn, double margin, NormKind norm, RowRef gh, RowRef gr,
                             RowRef gt, RowRef ghn, RowRef gtn) {
    const Eigen::RowVectorXd diff_pos = h + r - t;
    const Eigen::RowVectorXd diff_neg = hn + r - tn;
    const double loss = margin + transe_distance(diff_pos, norm) - transe_distance(diff_neg, norm);
    if (loss <= 0.0) {
        return 0.0;
    }
    const Eigen::RowVectorXd gp = distance_grad(diff_pos, norm);
    const Eigen::RowVectorXd gn = distance_grad(diff_neg, norm);
    gh += gp;
    gt -= gp;
    gr += gp - gn;
    ghn -= gn;
    gtn += gn;
    return loss;
}

double logistic_loss_grad(ModelKind kind, ConstRowRef h, ConstRowRef r, ConstRowRef t,
                          double label, double l2_reg, RowRef gh, RowRef gr, RowRef gt) {
    const double phi = score_rows(kind, NormKind::L2, h, r, t);
    // softplus(-label * phi), numerically stable for either sign
    const double z = -label * phi;
    const double loss = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    const double dphi = -label / (1.0 + std::exp(label * phi));

    if (kind == ModelKind::DistMult) {
        gh += dphi * r.cwiseProduct(t);
        gr += dphi * h.cwiseProduct(t);
        gt += dphi * h.cwiseProduct(r);
    } else if (kind == ModelKind::ComplEx) {
        const auto d = h.size() / 2;
        const auto hre = h.head(d), him = h.tail(d);
        const auto rre = r.head(d), rim = r.tail(d);
        const auto tre = t.head(d), tim = t.tail(d);
        gh.head(d) += dphi * (rre.cwiseProduct(tre) + rim.cwiseProduct(tim));
        gh.tail(d) += dphi * (rre.cwiseProduct(tim) - rim.cwiseProduct(tre));
        gr.head(d) += dphi * (hre.cwiseProduct(tre) + him.cwiseProduct(tim));
        gr.tail(d) += dphi * (hre.cwiseProduct(tim) - him.cwiseProduct(tre));
        gt.head(d) += dphi * (hre.cwiseProduct(rre) - him.cwiseProduct(rim));
        gt.tail(d) += dphi * (him.cwiseProduct(rre) + hre.cwiseProduct(rim));
    } else {
        throw std::invalid_argument("logistic_loss_grad: loss applies to distmult/complex");
    }

    double reg = 0.0;
    if (l2_reg > 0.0) {
        reg = l2_reg * (h.squaredNorm() + r.squaredNorm() + t.squaredNorm());
        gh += (2.0 * l2_reg) * h;
        gr += (2.0 * l2_reg) * r;
        gt += (2.0 * l2_reg) * t;
    }
    return loss + reg;
}

namespace {

struct SgdContext {
    EmbeddingModel& model;
    const TrainConfig& cfg;
};

// One positive with its negatives, immediate SGD updates. Returns the summed
// loss contribution.
double train_one(SgdContext& ctx, const Triple& pos, Rng& rng) {
    auto& E = ctx.model.entity_vecs;
    auto& R = ctx.model.relation_vecs;
    const auto num_entities = static_cast<std::uint64_t>(E.rows());
    const double lr = ctx.cfg.learning_rate;
    const auto width = ctx.model.width();
    double loss_sum = 0.0;

    Eigen::RowVectorXd gh(width), gr(width), gt(width), ghn(width), gtn(width);

    auto logistic_step = [&](const Triple& example, double label) {
        gh.setZero();
        gr.setZero();
        gt.setZero();
        loss_sum += logistic_loss_grad(ctx.model.kind, E.row(example.head),
                                       R.row(example.relation), E.row(example.tail), label,
                                       ctx.cfg.l2_reg, gh, gr, gt);
        E.row(example.head) -= lr * gh;
        R.row(example.relation) -= lr * gr;
        E.row(example.tail) -= lr * gt;
    };

    for (std::int32_t k = 0; k < ctx.cfg.negatives_per_positive; ++k) {
        Triple neg = pos;
        if (coin_flip(rng)) {
            neg.head = static_cast<EntityId>(uniform_below(rng, num_entities));
        } else {
            neg.tail = static_cast<EntityId>(uniform_below(rng, num_entities));
        }

        if (ctx.cfg.loss == LossKind::MarginRanking) {
            gh.setZero();
            gr.setZero();
            gt.setZero();
            ghn.setZero();
            gtn.setZero();
            const double loss = transe_pair_loss_grad(
                E.row(pos.head), R.row(pos.relation), E.row(pos.tail), E.row(neg.head),
                E.row(neg.tail), ctx.cfg.margin, ctx.cfg.norm, gh, gr, gt, ghn, gtn);
            loss_sum += loss;
            if (loss > 0.0) {
                E.row(pos.head) -= lr * gh;
                E.row(pos.tail) -= lr * gt;
                R.row(pos.relation) -= lr * gr;
                E.row(neg.head) -= lr * ghn;
                E.row(neg.tail) -= lr * gtn;
                for (EntityId e : {pos.head, pos.tail, neg.head, neg.tail}) {
                    const double n = E.row(e).norm();
                    if (n > 1e-12) {
                        E.row(e) /= n;
                    }
                }
            }
        } else {
            // One positive step per negative keeps the class balance even.
            logistic_step(pos, 1.0);
            logistic_step(neg, -1.0);
        }
    }
    return loss_sum;
}

} // namespace

TrainResult train(const KnowledgeGraph& kg, ModelKind kind, const TrainConfig& cfg) {
    cfg.validate(kind);
    if (kg.num_triples() == 0) {
        throw std::invalid_argument("train: graph is empty");
    }

    TrainResult result;
    result.model = init_model(kg, kind, cfg.dim, cfg.seed, cfg.norm);
    const auto& triples = kg.triples();
    const auto n = triples.size();

    Rng shuffle_rng(mix_seed(cfg.seed, 5));
    SgdContext ctx{result.model, cfg};

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }

    for (std::int32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_in_place(order, shuffle_rng);
        double epoch_loss = 0.0;

        if (cfg.workers <= 1) {
            Rng rng(mix_seed(cfg.seed, 0x10000ULL + static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = 0; i < n; ++i) {
                epoch_loss += train_one(ctx, triples[order[i]], rng);
            }
        } else {
            // Hogwild-style: concurrent unsynchronized updates, statistically
            // but not bitwise reproducible.
            std::vector<double> partial(static_cast<std::size_t>(cfg.workers), 0.0);
            std::atomic<std::size_t> slot{0};
            parallel_chunks(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
                const auto my_slot = slot.fetch_add(1);
                Rng rng(mix_seed(cfg.seed,
                                 0x20000ULL * (1 + my_slot) + static_cast<std::uint64_t>(epoch)));
                double local = 0.0;
                for (std::size_t i = begin; i < end; ++i) {
                    local += train_one(ctx, triples[order[i]], rng);
                }
                partial[my_slot] = local;
            });
            for (double p : partial) {
                epoch_loss += p;
            }
        }

        if (!std::isfinite(epoch_loss)) {
            throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                                     std::to_string(epoch) + "; lower the learning rate");
        }
        result.epoch_loss.push_back(epoch_loss);
    }
    result.model.check_finite();
    return result;
}

} // namespace kgattack

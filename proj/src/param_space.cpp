#include "ramda/param_space.hpp"

#include <cmath>
#include <set>

namespace ramda {

ModelLayout::ModelLayout(std::vector<LayerSpec> layers)
    : layers_(std::move(layers)) {
  std::set<std::string> names;
  offsets_.reserve(layers_.size());
  for (const LayerSpec& l : layers_) {
    if (l.name.empty()) throw std::invalid_argument("layer name empty");
    if (!names.insert(l.name).second)
      throw std::invalid_argument("duplicate layer name: " + l.name);
    if (l.shape.empty())
      throw std::invalid_argument("layer shape empty: " + l.name);
    for (Eigen::Index d : l.shape)
      if (d <= 0) throw std::invalid_argument("nonpositive dim in " + l.name);
    offsets_.push_back(total_);
    total_ += l.size();
  }
}

int ModelLayout::find(const std::string& name) const {
  for (int i = 0; i < num_layers(); ++i)
    if (layers_[i].name == name) return i;
  return -1;
}

void check_finite(const Eigen::VectorXd& v, const std::string& context) {
  if (!v.allFinite())
    throw std::runtime_error("non-finite value in " + context);
}

ParamVector::ParamVector(LayoutPtr layout, Eigen::VectorXd data)
    : layout_(std::move(layout)), data_(std::move(data)) {
  if (data_.size() != layout_->total_size())
    throw std::invalid_argument("ParamVector size does not match layout");
  check_finite(data_, "ParamVector construction");
}

Eigen::Map<Eigen::MatrixXd> ParamVector::layer_matrix(int layer) {
  const LayerSpec& l = layout_->layer(layer);
  if (l.shape.size() != 2)
    throw std::invalid_argument("layer_matrix: layer " + l.name +
                                " is not 2-D");
  return {data_.data() + layout_->offset(layer), l.shape[0], l.shape[1]};
}

Eigen::Map<const Eigen::MatrixXd> ParamVector::layer_matrix(int layer) const {
  const LayerSpec& l = layout_->layer(layer);
  if (l.shape.size() != 2)
    throw std::invalid_argument("layer_matrix: layer " + l.name +
                                " is not 2-D");
  return {data_.data() + layout_->offset(layer), l.shape[0], l.shape[1]};
}

void check_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("vector length mismatch");
}

Eigen::VectorXd add(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_same_length(a, b);
  return a + b;
}

Eigen::VectorXd scale(const Eigen::VectorXd& a, double s) { return s * a; }

Eigen::VectorXd hadamard(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_same_length(a, b);
  return a.cwiseProduct(b);
}

Eigen::VectorXd cbrt_elementwise(const Eigen::VectorXd& a) {
  return a.unaryExpr([](double x) { return std::cbrt(x); });
}

double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_same_length(a, b);
  return a.dot(b);
}

double norm2(const Eigen::VectorXd& a) { return a.norm(); }

double max_abs(const Eigen::VectorXd& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

GroupingRule parse_grouping_rule(const std::string& name) {
  if (name == "input-wise") return GroupingRule::kInputWise;
  if (name == "channel-wise") return GroupingRule::kChannelWise;
  if (name == "per-layer-matrix") return GroupingRule::kPerLayerMatrix;
  throw std::invalid_argument("unknown grouping rule: " + name);
}

std::string to_string(GroupingRule rule) {
  switch (rule) {
    case GroupingRule::kInputWise: return "input-wise";
    case GroupingRule::kChannelWise: return "channel-wise";
    case GroupingRule::kPerLayerMatrix: return "per-layer-matrix";
  }
  return "?";
}

GroupLayout::GroupLayout(std::vector<Group> groups, Eigen::Index dim)
    : groups_(std::move(groups)), dim_(dim) {
  std::set<int> seen;
  for (const Group& g : groups_) {
    if (g.weight <= 0.0) throw std::invalid_argument("group weight must be > 0");
    if (g.indices.size() == 0) throw std::invalid_argument("empty group");
    for (int i = 0; i < g.indices.size(); ++i) {
      int idx = g.indices[i];
      if (idx < 0 || idx >= dim_)
        throw std::invalid_argument("group index out of range");
      if (!seen.insert(idx).second)
        throw std::invalid_argument("groups overlap at index " +
                                    std::to_string(idx));
    }
    penalized_size_ += g.indices.size();
  }
}

GroupLayout make_group_layout(const ModelLayout& layout, GroupingRule rule,
                              double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be > 0");
  std::vector<Group> groups;
  for (int li = 0; li < layout.num_layers(); ++li) {
    const LayerSpec& l = layout.layer(li);
    if (!l.penalized) continue;
    const Eigen::Index off = layout.offset(li);
    switch (rule) {
      case GroupingRule::kInputWise: {
        if (l.shape.size() != 2)
          throw std::invalid_argument("input-wise grouping needs a 2-D layer: " +
                                      l.name);
        const Eigen::Index out = l.shape[0], in = l.shape[1];
        for (Eigen::Index j = 0; j < in; ++j) {
          Group g;
          g.indices = Eigen::VectorXi::LinSpaced(out, static_cast<int>(off + j * out),
                                                 static_cast<int>(off + j * out + out - 1));
          g.weight = lambda * std::sqrt(static_cast<double>(out));
          groups.push_back(std::move(g));
        }
        break;
      }
      case GroupingRule::kChannelWise: {
        if (l.shape.size() < 2)
          throw std::invalid_argument("channel-wise grouping needs >= 2 dims: " +
                                      l.name);
        const Eigen::Index channels = l.shape[0];
        const Eigen::Index per = l.size() / channels;
        for (Eigen::Index c = 0; c < channels; ++c) {
          Group g;
          g.indices.resize(per);
          // first index fastest: channel c sits at positions c + k*channels
          for (Eigen::Index k = 0; k < per; ++k)
            g.indices[static_cast<int>(k)] =
                static_cast<int>(off + c + k * channels);
          g.weight = lambda * std::sqrt(static_cast<double>(per));
          groups.push_back(std::move(g));
        }
        break;
      }
      case GroupingRule::kPerLayerMatrix: {
        Group g;
        g.indices = Eigen::VectorXi::LinSpaced(l.size(), static_cast<int>(off),
                                               static_cast<int>(off + l.size() - 1));
        g.weight = lambda * std::sqrt(static_cast<double>(l.size()));
        groups.push_back(std::move(g));
        break;
      }
    }
  }
  return {std::move(groups), layout.total_size()};
}

}  // namespace ramda

#pragma once

#include <Eigen/Core>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramda {

struct LayerSpec {
  std::string name;
  std::vector<Eigen::Index> shape;
  bool penalized = true;

  Eigen::Index size() const {
    Eigen::Index s = 1;
    for (Eigen::Index d : shape) s *= d;
    return s;
  }
};

// Ordered layer description of a model's flat parameter vector.
// Within a layer, coordinates are stored first-index-fastest, so for a
// 2-D (out, in) layer the flat segment is the column-major matrix and
// column j occupies the contiguous range [offset + j*out, offset + (j+1)*out).
class ModelLayout {
 public:
  explicit ModelLayout(std::vector<LayerSpec> layers);

  Eigen::Index total_size() const { return total_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  const LayerSpec& layer(int i) const { return layers_.at(i); }
  Eigen::Index offset(int i) const { return offsets_.at(i); }
  int find(const std::string& name) const;  // -1 if absent

 private:
  std::vector<LayerSpec> layers_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_ = 0;
};

using LayoutPtr = std::shared_ptr<const ModelLayout>;

// Throws std::runtime_error naming `context` if any entry is NaN/Inf.
void check_finite(const Eigen::VectorXd& v, const std::string& context);

// Flat parameter storage tied to a layout.
class ParamVector {
 public:
  explicit ParamVector(LayoutPtr layout)
      : layout_(std::move(layout)),
        data_(Eigen::VectorXd::Zero(layout_->total_size())) {}

  ParamVector(LayoutPtr layout, Eigen::VectorXd data);

  const LayoutPtr& layout() const { return layout_; }
  Eigen::VectorXd& vec() { return data_; }
  const Eigen::VectorXd& vec() const { return data_; }
  Eigen::Index size() const { return data_.size(); }

  Eigen::VectorBlock<Eigen::VectorXd> segment(int layer) {
    return data_.segment(layout_->offset(layer), layout_->layer(layer).size());
  }
  Eigen::VectorBlock<const Eigen::VectorXd> segment(int layer) const {
    return data_.segment(layout_->offset(layer), layout_->layer(layer).size());
  }

  // 2-D layers only; column-major view onto the flat segment.
  Eigen::Map<Eigen::MatrixXd> layer_matrix(int layer);
  Eigen::Map<const Eigen::MatrixXd> layer_matrix(int layer) const;

 private:
  LayoutPtr layout_;
  Eigen::VectorXd data_;
};

// Elementwise vector algebra. Eigen expressions cover most uses; these
// wrappers add the length checks the optimizers rely on.
void check_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

Eigen::VectorXd add(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd scale(const Eigen::VectorXd& a, double s);
Eigen::VectorXd hadamard(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
// Sign-preserving real cube root, elementwise.
Eigen::VectorXd cbrt_elementwise(const Eigen::VectorXd& a);
double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double norm2(const Eigen::VectorXd& a);
double max_abs(const Eigen::VectorXd& a);

// One group of penalized coordinates with its weight.
struct Group {
  Eigen::VectorXi indices;
  double weight = 0.0;  // lambda_g > 0
};

enum class GroupingRule { kInputWise, kChannelWise, kPerLayerMatrix };

GroupingRule parse_grouping_rule(const std::string& name);
std::string to_string(GroupingRule rule);

// Disjoint groups covering exactly the penalized coordinates of a layout.
class GroupLayout {
 public:
  GroupLayout() = default;
  GroupLayout(std::vector<Group> groups, Eigen::Index dim);

  int num_groups() const { return static_cast<int>(groups_.size()); }
  const Group& group(int g) const { return groups_.at(g); }
  const std::vector<Group>& groups() const { return groups_; }
  Eigen::Index dim() const { return dim_; }
  Eigen::Index penalized_size() const { return penalized_size_; }

 private:
  std::vector<Group> groups_;
  Eigen::Index dim_ = 0;
  Eigen::Index penalized_size_ = 0;
};

// Per-group weight is lambda * sqrt(group size). Unpenalized layers
// contribute no groups; zero-weight groups never arise since lambda > 0.
GroupLayout make_group_layout(const ModelLayout& layout, GroupingRule rule,
                              double lambda);

}  // namespace ramda

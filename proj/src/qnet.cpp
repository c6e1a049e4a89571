#include "firenav/qnet.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "firenav/errors.hpp"
#include "firenav/rng.hpp"
#include "firenav/text.hpp"

namespace firenav {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

void glorot_uniform(Eigen::MatrixXd& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / double(m.rows() + m.cols()));
  // Row-major fill order so the draw sequence matches the file layout.
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
}

}  // namespace

FeatureProjector::FeatureProjector(int window, int feature_width, std::uint64_t seed)
    : window_(window),
      feature_width_(feature_width),
      seed_(seed),
      matrix_(feature_width, window * window) {
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(double(window * window));
  for (Eigen::Index r = 0; r < matrix_.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix_.cols(); ++c) matrix_(r, c) = rng.normal() * scale;
}

Parameters Parameters::zeros(const QNetShape& shape) {
  return {Eigen::MatrixXd::Zero(shape.hidden, shape.input_width()),
          Eigen::VectorXd::Zero(shape.hidden),
          Eigen::MatrixXd::Zero(shape.actions, shape.hidden),
          Eigen::VectorXd::Zero(shape.actions)};
}

bool operator==(const Parameters& a, const Parameters& b) {
  return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
}

QNetwork::QNetwork(QNetShape shape, std::uint64_t seed)
    : shape_(shape),
      projector_(std::make_shared<const FeatureProjector>(shape.window, shape.feature_width,
                                                          derive_seed(seed, 1))),
      params_(Parameters::zeros(shape)) {
  Rng rng(derive_seed(seed, 2));
  glorot_uniform(params_.w1, rng);
  glorot_uniform(params_.w2, rng);
}

QNetwork::QNetwork(std::shared_ptr<const FeatureProjector> projector, Parameters params)
    : projector_(std::move(projector)), params_(std::move(params)) {
  shape_.window = projector_->window();
  shape_.feature_width = projector_->feature_width();
  shape_.hidden = int(params_.w1.rows());
  shape_.actions = int(params_.w2.rows());
  if (params_.w1.cols() != shape_.input_width() || params_.b1.size() != shape_.hidden ||
      params_.w2.cols() != shape_.hidden || params_.b2.size() != shape_.actions)
    throw std::invalid_argument("parameter shapes do not match the projector");
}

const std::vector<double>& QNetwork::frame_features(const Frame& frame) const {
  if (frame.size != shape_.window)
    throw std::invalid_argument("observation window does not match the network");
  const auto& cached = frame.features;
  if (cached && cached->projector_seed == projector_->seed() && cached->width == shape_.feature_width)
    return cached->values;
  auto f = std::make_shared<Frame::Features>();
  f->projector_seed = projector_->seed();
  f->width = shape_.feature_width;
  f->values.resize(std::size_t(shape_.feature_width));
  Eigen::Map<Eigen::VectorXd>(f->values.data(), shape_.feature_width).noalias() =
      projector_->matrix() * Eigen::Map<const Eigen::VectorXd>(frame.pixels.data(), shape_.frame_pixels());
  frame.features = f;
  return f->values;
}

Eigen::MatrixXd QNetwork::features(std::span<const Observation* const> batch) const {
  const int df = shape_.feature_width;
  Eigen::MatrixXd x(shape_.input_width(), Eigen::Index(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (int f = 0; f < kFrameStack; ++f)
      x.col(Eigen::Index(i)).segment(f * df, df) =
          Eigen::Map<const Eigen::VectorXd>(frame_features(batch[i]->frame(f)).data(), df);
  return x;
}

Eigen::MatrixXd QNetwork::forward_batch(std::span<const Observation* const> batch) const {
  const Eigen::MatrixXd x = features(batch);
  const Eigen::MatrixXd h = ((params_.w1 * x).colwise() + params_.b1).cwiseMax(0.0);
  return (params_.w2 * h).colwise() + params_.b2;
}

QValues QNetwork::forward(const Observation& obs) const {
  const Observation* one[] = {&obs};
  const Eigen::MatrixXd q = forward_batch(one);
  QValues out{};
  for (int a = 0; a < kNumActions && a < q.rows(); ++a) out[std::size_t(a)] = q(a, 0);
  return out;
}

BackwardResult QNetwork::backward(std::span<const TrainingExample> batch) const {
  if (batch.empty()) throw std::invalid_argument("backward() needs a non-empty batch");
  const auto n = Eigen::Index(batch.size());
  std::vector<const Observation*> obs(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) obs[i] = batch[i].observation;

  const Eigen::MatrixXd x = features(obs);
  const Eigen::MatrixXd z1 = (params_.w1 * x).colwise() + params_.b1;
  const Eigen::MatrixXd h = z1.cwiseMax(0.0);
  const Eigen::MatrixXd q = (params_.w2 * h).colwise() + params_.b2;

  // d(mean (y - q_a)^2)/dq_a = 2 (q_a - y) / n; untaken actions get nothing.
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), n);
  BackwardResult out;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto a = Eigen::Index(batch[std::size_t(i)].action);
    const double y = batch[std::size_t(i)].target;
    out.loss += squared_error(q(a, i), y);
    dq(a, i) = 2.0 * (q(a, i) - y) / double(n);
  }
  out.loss /= double(n);

  Gradients& g = out.gradients;
  g.w2.noalias() = dq * h.transpose();
  g.b2 = dq.rowwise().sum();
  Eigen::MatrixXd dz1 = params_.w2.transpose() * dq;
  dz1 = dz1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g.w1.noalias() = dz1 * x.transpose();
  g.b1 = dz1.rowwise().sum();
  return out;
}

void QNetwork::load(const ParameterSnapshot& snapshot) {
  if (snapshot.w1.rows() != params_.w1.rows() || snapshot.w1.cols() != params_.w1.cols() ||
      snapshot.w2.rows() != params_.w2.rows() || snapshot.w2.cols() != params_.w2.cols())
    throw std::invalid_argument("snapshot shape mismatch");
  params_ = snapshot;
}

RmsProp::RmsProp(const QNetShape& shape, RmsPropConfig config)
    : config_(config), mean_square_(Parameters::zeros(shape)) {}

void RmsProp::apply(Parameters& params, const Gradients& grads) {
  const double decay = config_.decay;
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;
  auto step = [&](auto& p, auto& ms, const auto& g) {
    ms.array() = decay * ms.array() + (1.0 - decay) * g.array().square();
    p.array() -= lr * g.array() / (ms.array().sqrt() + eps);
  };
  step(params.w1, mean_square_.w1, grads.w1);
  step(params.b1, mean_square_.b1, grads.b1);
  step(params.w2, mean_square_.w2, grads.w2);
  step(params.b2, mean_square_.b2, grads.b2);
}

std::size_t argmax_lowest(const QValues& q) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < q.size(); ++a)
    if (q[a] > q[best]) best = a;
  return best;
}

// --- checkpoint I/O ---

namespace {

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

void put_matrix(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put(out, m(r, c));
}

void put_vector(std::string& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put(out, v(i));
}

void put_parameters(std::string& out, const Parameters& p) {
  put_matrix(out, p.w1);
  put_vector(out, p.b1);
  put_matrix(out, p.w2);
  put_vector(out, p.b2);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) throw CheckpointError("checkpoint truncated");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void matrix(Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<double>();
  }
  void vector(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get<double>();
  }
  void parameters(Parameters& p) {
    matrix(p.w1);
    vector(p.b1);
    matrix(p.w2);
    vector(p.b2);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

constexpr int kMaxDimension = 1 << 16;

}  // namespace

std::string encode_checkpoint(const QNetwork& net, const RmsProp& opt) {
  std::string out = "QNET";
  put<std::uint32_t>(out, kCheckpointVersion);
  const QNetShape& s = net.shape();
  put<std::uint32_t>(out, std::uint32_t(s.window));
  put<std::uint32_t>(out, std::uint32_t(s.feature_width));
  put<std::uint32_t>(out, std::uint32_t(s.hidden));
  put<std::uint32_t>(out, std::uint32_t(s.actions));
  put<std::uint64_t>(out, net.projector().seed());
  put_parameters(out, net.parameters());
  put_parameters(out, opt.mean_square());
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net, const RmsProp& opt) {
  write_file(path, encode_checkpoint(net, opt));
}

CheckpointHeader read_checkpoint_header(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "QNET") throw CheckpointError("not a checkpoint (bad magic)");
  Reader in(bytes.substr(4));
  CheckpointHeader h;
  h.version = in.get<std::uint32_t>();
  if (h.version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(h.version));
  h.shape.window = int(in.get<std::uint32_t>());
  h.shape.feature_width = int(in.get<std::uint32_t>());
  h.shape.hidden = int(in.get<std::uint32_t>());
  h.shape.actions = int(in.get<std::uint32_t>());
  h.projector_seed = in.get<std::uint64_t>();
  const QNetShape& s = h.shape;
  for (int d : {s.window, s.feature_width, s.hidden})
    if (d <= 0 || d > kMaxDimension) throw CheckpointError("implausible checkpoint dimensions");
  if (s.actions != kNumActions) throw CheckpointError("checkpoint must have 5 actions");
  if (s.window % 2 == 0) throw CheckpointError("checkpoint window must be odd");
  return h;
}

Checkpoint decode_checkpoint(std::string_view bytes, RmsPropConfig config) {
  const CheckpointHeader h = read_checkpoint_header(bytes);
  constexpr std::size_t kHeaderBytes = 4 + 5 * 4 + 8;
  const QNetShape& s = h.shape;
  const std::size_t doubles =
      2 * (std::size_t(s.hidden) * std::size_t(s.input_width()) + std::size_t(s.hidden) +
           std::size_t(s.actions) * std::size_t(s.hidden) + std::size_t(s.actions));
  if (bytes.size() < kHeaderBytes + doubles * 8) throw CheckpointError("checkpoint truncated");
  if (bytes.size() > kHeaderBytes + doubles * 8) throw CheckpointError("trailing bytes after checkpoint");

  Reader in(bytes.substr(kHeaderBytes));
  Parameters params = Parameters::zeros(s);
  in.parameters(params);
  RmsProp opt(s, config);
  in.parameters(opt.mutable_mean_square());
  auto projector = std::make_shared<const FeatureProjector>(s.window, s.feature_width, h.projector_seed);
  return {QNetwork(std::move(projector), std::move(params)), std::move(opt)};
}

Checkpoint load_checkpoint(const std::filesystem::path& path, RmsPropConfig config) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const std::runtime_error& e) {
    throw CheckpointError(e.what());
  }
  return decode_checkpoint(bytes, config);
}

}  // namespace firenav

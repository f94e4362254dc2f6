#include "demo2prog/micronet.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "demo2prog/errors.hpp"

namespace demo2prog {

std::vector<int> MicroNet::layer_sizes() const {
  std::vector<int> sizes{input_dim()};
  for (const auto& w : weights) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

void MicroNet::validate() const {
  if (weights.empty() || weights.size() != biases.size()) {
    throw ConfigError("micronet has no layers");
  }
  int in = input_dim();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].cols() != in || biases[l].size() != weights[l].rows()) {
      throw DimensionError("micronet layer dimensions do not chain");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw NumericalError("micronet weights must be finite");
    }
    in = static_cast<int>(weights[l].rows());
  }
  if (in != joint_dim) {
    throw DimensionError("micronet output size must equal joint_dim");
  }
}

MicroNet make_micronet(int input_width, int input_height, int joint_dim,
                       const std::vector<int>& hidden, Rng& rng) {
  MicroNet net;
  net.input_width = input_width;
  net.input_height = input_height;
  net.joint_dim = joint_dim;
  std::vector<int> sizes{net.input_dim()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(joint_dim);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

Eigen::VectorXd net_input(const MicroNet& net, const Image& image,
                          const JointState& theta) {
  if (theta.size() != net.joint_dim) {
    throw DimensionError("joint state does not match micronet joint_dim");
  }
  const Image& small =
      (image.width == net.input_width && image.height == net.input_height)
          ? image
          : downsample_area(image, net.input_width, net.input_height);
  Eigen::VectorXd x(net.input_dim());
  const std::size_t n_px = 3 * small.pixel_count();
  for (std::size_t i = 0; i < n_px; ++i) x[static_cast<Eigen::Index>(i)] =
      small.pixels[i];
  x.tail(net.joint_dim) = theta;
  return x;
}

namespace {

// Post-activation outputs for every layer, inputs included.
std::vector<Eigen::VectorXd> forward_activations(const MicroNet& net,
                                                 const Eigen::VectorXd& input) {
  std::vector<Eigen::VectorXd> acts;
  acts.reserve(net.weights.size() + 1);
  acts.push_back(input);
  const int last = net.layer_count() - 1;
  for (int l = 0; l <= last; ++l) {
    Eigen::VectorXd z = net.weights[l] * acts.back() + net.biases[l];
    acts.push_back(l == last ? z : z.array().tanh().matrix());
  }
  return acts;
}

}  // namespace

Eigen::VectorXd net_forward(const MicroNet& net,
                            const Eigen::VectorXd& input) {
  if (input.size() != net.input_dim()) {
    throw DimensionError("micronet input size mismatch");
  }
  return forward_activations(net, input).back();
}

ControlSignal net_forward(const MicroNet& net, const Image& image,
                          const JointState& theta) {
  return net_forward(net, net_input(net, image, theta));
}

double loss_and_gradients(const MicroNet& net, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets,
                          NetGradients& grads) {
  const Eigen::Index n = inputs.rows();
  if (n == 0) throw ConfigError("empty training batch");
  if (targets.rows() != n || targets.cols() != net.joint_dim ||
      inputs.cols() != net.input_dim()) {
    throw DimensionError("training batch dimensions mismatch");
  }
  const int last = net.layer_count() - 1;

  // Batched forward, samples as rows.
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(net.weights.size() + 1);
  acts.push_back(inputs);
  for (int l = 0; l <= last; ++l) {
    Eigen::MatrixXd z = (acts.back() * net.weights[l].transpose()).rowwise() +
                        net.biases[l].transpose();
    acts.push_back(l == last ? z : z.array().tanh().matrix());
  }

  const Eigen::MatrixXd resid = acts.back() - targets;
  const double denom = static_cast<double>(n) * net.joint_dim;
  const double loss = resid.squaredNorm() / denom;

  grads.weights.resize(net.weights.size());
  grads.biases.resize(net.biases.size());
  Eigen::MatrixXd d_post = 2.0 * resid / denom;  // dLoss/d activation
  for (int l = last; l >= 0; --l) {
    Eigen::MatrixXd dz =
        (l == last)
            ? std::move(d_post)
            : (d_post.array() * (1.0 - acts[l + 1].array().square())).matrix();
    grads.weights[l] = dz.transpose() * acts[l];
    grads.biases[l] = dz.colwise().sum().transpose();
    if (l > 0) d_post = dz * net.weights[l];
  }
  return loss;
}

double mse_loss(const MicroNet& net, const Eigen::MatrixXd& inputs,
                const Eigen::MatrixXd& targets) {
  const int last = net.layer_count() - 1;
  Eigen::MatrixXd a = inputs;
  for (int l = 0; l <= last; ++l) {
    Eigen::MatrixXd z =
        (a * net.weights[l].transpose()).rowwise() + net.biases[l].transpose();
    a = (l == last) ? z : z.array().tanh().matrix();
  }
  return (a - targets).squaredNorm() /
         (static_cast<double>(inputs.rows()) * net.joint_dim);
}

Eigen::MatrixXd input_jacobian(const MicroNet& net,
                               const Eigen::VectorXd& input) {
  if (input.size() != net.input_dim()) {
    throw DimensionError("micronet input size mismatch");
  }
  const auto acts = forward_activations(net, input);
  const int last = net.layer_count() - 1;
  Eigen::MatrixXd jac(net.joint_dim, net.input_dim());
  for (int j = 0; j < net.joint_dim; ++j) {
    Eigen::VectorXd delta = Eigen::VectorXd::Unit(net.joint_dim, j);
    for (int l = last; l >= 0; --l) {
      if (l != last) {
        delta = delta.cwiseProduct(
            (1.0 - acts[static_cast<std::size_t>(l) + 1].array().square())
                .matrix());
      }
      delta = net.weights[l].transpose() * delta;
    }
    jac.row(j) = delta.transpose();
  }
  return jac;
}

TrainResult train(MicroNet& net, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, const TrainConfig& cfg) {
  net.validate();
  TrainResult result;
  result.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs) + 1);

  NetGradients grads;
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  for (const auto& w : net.weights) {
    mw.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    vw.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.biases) {
    mb.push_back(Eigen::VectorXd::Zero(b.size()));
    vb.push_back(Eigen::VectorXd::Zero(b.size()));
  }

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double loss = loss_and_gradients(net, inputs, targets, grads);
    if (!std::isfinite(loss)) {
      throw DivergenceError("training loss diverged at epoch " +
                            std::to_string(epoch));
    }
    result.loss_curve.push_back(loss);

    const double bc1 = 1.0 - std::pow(cfg.beta1, epoch);
    const double bc2 = 1.0 - std::pow(cfg.beta2, epoch);
    for (int l = 0; l < net.layer_count(); ++l) {
      auto adam = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square())
                .matrix();
        param.array() -= cfg.learning_rate * (m.array() / bc1) /
                         ((v.array() / bc2).sqrt() + cfg.epsilon);
      };
      adam(net.weights[l], mw[l], vw[l], grads.weights[l]);
      adam(net.biases[l], mb[l], vb[l], grads.biases[l]);
    }
  }
  const double final_loss = mse_loss(net, inputs, targets);
  if (!std::isfinite(final_loss)) {
    throw DivergenceError("training loss diverged");
  }
  result.loss_curve.push_back(final_loss);
  return result;
}

SaliencyMap input_gradient_saliency(const MicroNet& net, const Image& image,
                                    const JointState& theta) {
  const Eigen::VectorXd x = net_input(net, image, theta);
  const Eigen::MatrixXd jac = input_jacobian(net, x);
  SaliencyMap map;
  map.width = net.input_width;
  map.height = net.input_height;
  map.values.assign(static_cast<std::size_t>(map.width) * map.height, 0.0);
  for (int p = 0; p < map.width * map.height; ++p) {
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) acc += jac.col(3 * p + c).cwiseAbs().sum();
    map.values[static_cast<std::size_t>(p)] = acc;
  }
  map.max_normalize();
  return map;
}

void save_micronet(const MicroNet& net, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path);
  f << "micronet " << net.input_width << " " << net.input_height << " "
    << net.joint_dim;
  for (int s : net.layer_sizes()) f << " " << s;
  f << "\n";
  // Raw little-endian float64 payload, weights row-major then biases,
  // layer by layer.
  for (int l = 0; l < net.layer_count(); ++l) {
    const auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double v = w(r, c);
        f.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
    const auto& b = net.biases[l];
    f.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(sizeof(double) * b.size()));
  }
  if (!f) throw MissingInputError("short write: " + path);
}

MicroNet load_micronet(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open: " + path);
  std::string header;
  if (!std::getline(f, header)) throw ConfigError("empty net file: " + path);
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "micronet") throw ConfigError("bad net header: " + path);
  MicroNet net;
  int n_sizes_expected = 0;
  hs >> net.input_width >> net.input_height >> net.joint_dim;
  std::vector<int> sizes;
  while (hs >> n_sizes_expected) sizes.push_back(n_sizes_expected);
  if (sizes.size() < 2 || sizes.front() != net.input_dim() ||
      sizes.back() != net.joint_dim) {
    throw ConfigError("inconsistent net header: " + path);
  }
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        double v;
        f.read(reinterpret_cast<char*>(&v), sizeof(v));
        w(r, c) = v;
      }
    }
    Eigen::VectorXd b(sizes[l + 1]);
    f.read(reinterpret_cast<char*>(b.data()),
           static_cast<std::streamsize>(sizeof(double) * b.size()));
    if (!f) throw ConfigError("truncated net payload: " + path);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  net.validate();
  return net;
}

}  // namespace demo2prog

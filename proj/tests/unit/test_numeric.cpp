#include <doctest.h>

#include <cmath>
#include <numbers>

#include "costreg/errors.hpp"
#include "costreg/numeric/adam.hpp"
#include "costreg/numeric/checkpoint.hpp"
#include "costreg/numeric/dense_network.hpp"
#include "costreg/numeric/gradient_check.hpp"
#include "costreg/numeric/rng.hpp"
#include "support/oracles.hpp"

using namespace costreg;

namespace {

DenseNetwork random_net(std::vector<int> sizes, std::uint64_t seed, Activation hidden = Activation::relu,
                        Activation out = Activation::identity) {
  DenseNetwork net(std::move(sizes), hidden, out);
  Rng rng(seed);
  net.initialize(rng);
  return net;
}

}  // namespace

TEST_SUITE("forward") {
  TEST_CASE("zero parameters give a zero output") {
    DenseNetwork net({3, 5, 2}, Activation::relu, Activation::identity);
    Rng rng(1);
    net.initialize(rng);
    net.parameters() *= 0.0;
    const Vector y = net.predict(Vector(Vector::Constant(3, 7.5)));
    CHECK(y.size() == 2);
    CHECK(y.isZero(0.0));
  }

  TEST_CASE("identity weights reproduce the input") {
    DenseNetwork net({2, 2}, Activation::relu, Activation::identity);
    net.parameters().weights[0] = Matrix::Identity(2, 2);
    net.parameters().biases[0] = Vector::Zero(2);
    const Vector y = net.predict(Vector{{1.0, 2.0}});
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 2.0);
  }

  TEST_CASE("matches a scalar re-implementation") {
    for (Activation hidden : {Activation::relu, Activation::tanh}) {
      for (Activation out : {Activation::identity, Activation::tanh, Activation::sigmoid, Activation::softplus}) {
        const DenseNetwork net = random_net({4, 8, 2}, 42, hidden, out);
        Rng rng(7);
        for (int k = 0; k < 20; ++k) {
          const Vector x = rng.uniform_vector(4, -2.0, 2.0);
          const Vector y = net.predict(x);
          const auto ref = testing::scalar_forward(net, {x.data(), x.data() + x.size()});
          for (int i = 0; i < 2; ++i) CHECK(y[i] == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-13));
        }
      }
    }
  }

  TEST_CASE("batched columns equal single-sample passes") {
    const DenseNetwork net = random_net({3, 6, 6, 2}, 3, Activation::tanh);
    Rng rng(4);
    const Matrix x = rng.normal_matrix(3, 9);
    const Matrix y = net.predict(x);
    for (Eigen::Index j = 0; j < x.cols(); ++j) CHECK((y.col(j) - net.predict(Vector(x.col(j)))).norm() < 1e-14);
  }

  TEST_CASE("output ranges of bounded activations") {
    const DenseNetwork sig = random_net({2, 4, 3}, 5, Activation::relu, Activation::sigmoid);
    const DenseNetwork th = random_net({2, 4, 3}, 5, Activation::relu, Activation::tanh);
    Rng rng(6);
    const Matrix x = 1e4 * rng.normal_matrix(2, 200);
    const Matrix s = sig.predict(x);
    const Matrix t = th.predict(x);
    CHECK((s.array() > 0.0).all());
    CHECK((s.array() < 1.0).all());
    CHECK((t.array() >= -1.0).all());
    CHECK((t.array() <= 1.0).all());
  }

  TEST_CASE("softplus output is positive and stable for large inputs") {
    const DenseNetwork net = random_net({2, 4, 3}, 5, Activation::relu, Activation::softplus);
    Rng rng(6);
    const Matrix x = 1e4 * rng.normal_matrix(2, 200);
    const Matrix y = net.predict(x);
    CHECK(y.allFinite());
    CHECK((y.array() >= 0.0).all());
    DenseNetwork one({1, 1}, Activation::relu, Activation::softplus);
    one.parameters().weights[0](0, 0) = 1.0;
    one.parameters().biases[0](0) = 0.0;
    CHECK(one.predict(Vector(Vector::Constant(1, 0.0)))[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(one.predict(Vector(Vector::Constant(1, 800.0)))[0] == 800.0);
    CHECK(one.predict(Vector(Vector::Constant(1, -800.0)))[0] == 0.0);
  }

  TEST_CASE("forward is pure and the cache replays bit-exactly") {
    const DenseNetwork net = random_net({5, 7, 3}, 8, Activation::tanh, Activation::sigmoid);
    Rng rng(9);
    const Matrix x = rng.normal_matrix(5, 4);
    const ForwardCache a = net.forward(x);
    const ForwardCache b = net.forward(x);
    CHECK(a.output() == b.output());
    CHECK(net.predict(x) == a.output());
    CHECK(a.input() == x);
  }

  TEST_CASE("input width mismatch is a configuration error") {
    const DenseNetwork net = random_net({3, 4, 1}, 1);
    CHECK_THROWS_AS(net.predict(Vector(Vector::Zero(4))), ConfigurationError);
  }

  TEST_CASE("inconsistent layer description is rejected") {
    CHECK_THROWS_AS(DenseNetwork({3}, Activation::relu, Activation::identity), ConfigurationError);
    CHECK_THROWS_AS(DenseNetwork({3, 0, 1}, Activation::relu, Activation::identity), ConfigurationError);
  }
}

TEST_SUITE("backward") {
  TEST_CASE("identity layer passes the gradient through") {
    DenseNetwork net({1, 1}, Activation::relu, Activation::identity);
    net.parameters().weights[0](0, 0) = 1.0;
    net.parameters().biases[0](0) = 0.0;
    const ForwardCache cache = net.forward(Matrix::Constant(1, 1, 0.3));
    const Gradients g = net.backward(cache, Matrix::Ones(1, 1));
    CHECK(g.input(0, 0) == 1.0);
    CHECK(g.parameters.weights[0](0, 0) == doctest::Approx(0.3));
    CHECK(g.parameters.biases[0](0) == 1.0);
  }

  TEST_CASE("zero output gradient gives zero gradients") {
    const DenseNetwork net = random_net({3, 5, 2}, 11, Activation::tanh);
    Rng rng(2);
    const ForwardCache cache = net.forward(rng.normal_matrix(3, 6));
    const Gradients g = net.backward(cache, Matrix::Zero(2, 6));
    CHECK(flatten(g.parameters).isZero(0.0));
    CHECK(g.input.isZero(0.0));
  }

  TEST_CASE("softplus output layer agrees with central differences") {
    const DenseNetwork net = random_net({3, 6, 2}, 23, Activation::tanh, Activation::softplus);
    const Vector x{{-0.4, 0.9, 0.2}};
    const Matrix g{{0.7}, {-1.3}};
    const Gradients grad = net.backward(net.forward(Matrix(x)), g);
    DenseNetwork probe = net;
    const Vector fd = finite_diff_gradient(
        [&](const Vector& t) {
          unflatten(t, probe.parameters());
          return g.col(0).dot(probe.predict(x));
        },
        flatten(net.parameters()), 1e-5);
    const Vector analytic = flatten(grad.parameters);
    for (Eigen::Index i = 0; i < fd.size(); ++i) CHECK(testing::relative_error(analytic[i], fd[i]) < 1e-4);
  }

  TEST_CASE("random [3,5,1] network agrees with central differences") {
    for (Activation hidden : {Activation::relu, Activation::tanh}) {
      const DenseNetwork net = random_net({3, 5, 1}, 21, hidden);
      const Vector x{{0.31, -0.72, 0.55}};
      const Gradients g = net.backward(net.forward(Matrix(x)), Matrix::Ones(1, 1));
      DenseNetwork probe = net;
      const Vector fd = finite_diff_gradient(
          [&](const Vector& t) {
            unflatten(t, probe.parameters());
            return probe.predict(x)[0];
          },
          flatten(net.parameters()), 1e-5);
      const Vector analytic = flatten(g.parameters);
      for (Eigen::Index i = 0; i < fd.size(); ++i) CHECK(testing::relative_error(analytic[i], fd[i]) < 1e-4);
      const Vector fdx = finite_diff_gradient([&](const Vector& v) { return net.predict(v)[0]; }, x, 1e-5);
      for (Eigen::Index i = 0; i < 3; ++i) CHECK(testing::relative_error(g.input(i, 0), fdx[i]) < 1e-4);
    }
  }

  TEST_CASE("gradients sum over the batch") {
    const DenseNetwork net = random_net({2, 4, 1}, 31, Activation::tanh);
    Rng rng(3);
    const Matrix x = rng.normal_matrix(2, 5);
    const Gradients whole = net.backward(net.forward(x), Matrix::Ones(1, 5));
    ParameterSet sum = net.parameters().zeros_like();
    for (Eigen::Index j = 0; j < 5; ++j) sum += net.backward(net.forward(Matrix(x.col(j))), Matrix::Ones(1, 1)).parameters;
    CHECK((flatten(sum) - flatten(whole.parameters)).lpNorm<Eigen::Infinity>() < 1e-12);
  }

  TEST_CASE("stale cache is an internal error") {
    const DenseNetwork a = random_net({3, 4, 1}, 1);
    const DenseNetwork b = random_net({3, 6, 1}, 1);
    const ForwardCache cache = a.forward(Matrix::Zero(3, 2));
    CHECK_THROWS_AS(b.backward(cache, Matrix::Ones(1, 2)), InternalError);
    CHECK_THROWS_AS(a.backward(cache, Matrix::Ones(1, 3)), InternalError);
  }

  TEST_CASE("random networks agree with central differences") {
    Rng rng(2024);
    for (int k = 0; k < 100; ++k) {
      const auto r = testing::check_random_network(rng);
      CHECK(r.max_relative_error < 1e-4);
    }
  }
}

TEST_SUITE("finite differences") {
  TEST_CASE("square") {
    const Vector g = finite_diff_gradient([](const Vector& x) { return x[0] * x[0]; }, Vector::Constant(1, 3.0), 1e-5);
    CHECK(std::abs(g[0] - 6.0) < 1e-6);
  }

  TEST_CASE("constant function") {
    const Vector g = finite_diff_gradient([](const Vector&) { return 4.0; }, Vector::Ones(3), 1e-5);
    CHECK(g.isZero(0.0));
  }

  TEST_CASE("sum of sines") {
    const Vector x{{0.0, std::numbers::pi / 2}};
    const Vector g = finite_diff_gradient([](const Vector& v) { return v.array().sin().sum(); }, x, 1e-5);
    CHECK(std::abs(g[0] - 1.0) < 1e-6);
    CHECK(std::abs(g[1]) < 1e-6);
  }

  TEST_CASE("non-finite evaluation is a numeric error") {
    CHECK_THROWS_AS(finite_diff_gradient([](const Vector& v) { return std::log(v[0]); }, Vector::Zero(1), 1e-5),
                    NumericError);
  }
}

TEST_SUITE("adam") {
  TEST_CASE("zero gradient leaves parameters unchanged") {
    DenseNetwork net = random_net({2, 3, 1}, 5);
    const Vector before = flatten(net.parameters());
    AdamState s = AdamState::for_parameters(net.parameters());
    adam_step(net.parameters(), net.parameters().zeros_like(), s, 0.1);
    CHECK(flatten(net.parameters()) == before);
    CHECK(s.step == 1);
  }

  TEST_CASE("first step moves by the learning rate against the gradient sign") {
    DenseNetwork net = random_net({2, 3, 1}, 5);
    const Vector before = flatten(net.parameters());
    Rng rng(8);
    ParameterSet g = net.parameters().zeros_like();
    unflatten(rng.uniform_vector(before.size(), -3.0, 3.0), g);
    AdamState s = AdamState::for_parameters(net.parameters());
    const double lr = 0.01;
    adam_step(net.parameters(), g, s, lr);
    const Vector delta = flatten(net.parameters()) - before;
    const Vector gf = flatten(g);
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      const double expected = -lr * gf[i] / (std::abs(gf[i]) + 1e-8);
      CHECK(delta[i] == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  TEST_CASE("step counter increases by one per update and shapes match") {
    DenseNetwork net = random_net({3, 4, 2}, 6);
    AdamState s = AdamState::for_parameters(net.parameters());
    CHECK(s.first_moment.same_shape(net.parameters()));
    CHECK(s.second_moment.same_shape(net.parameters()));
    for (std::uint64_t k = 1; k <= 5; ++k) {
      adam_step(net.parameters(), net.parameters(), s, 1e-3);
      CHECK(s.step == k);
    }
  }

  TEST_CASE("converges on a scalar quadratic") {
    DenseNetwork net({1, 1}, Activation::relu, Activation::identity);
    net.parameters().weights[0](0, 0) = 0.0;
    net.parameters().biases[0](0) = 0.0;
    AdamState s = AdamState::for_parameters(net.parameters());
    for (int k = 0; k < 100; ++k) {
      ParameterSet g = net.parameters().zeros_like();
      g.weights[0](0, 0) = 2.0 * (net.parameters().weights[0](0, 0) - 2.0);
      adam_step(net.parameters(), g, s, 0.1);
    }
    CHECK(std::abs(net.parameters().weights[0](0, 0) - 2.0) < 0.1);
  }

  TEST_CASE("non-finite gradient names the layer and leaves parameters intact") {
    DenseNetwork net = random_net({2, 3, 1}, 5);
    const Vector before = flatten(net.parameters());
    ParameterSet g = net.parameters().zeros_like();
    g.biases[1](0) = std::numeric_limits<double>::quiet_NaN();
    AdamState s = AdamState::for_parameters(net.parameters());
    try {
      adam_step(net.parameters(), g, s, 0.1);
      FAIL("expected a numeric error");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
    }
    CHECK(flatten(net.parameters()) == before);
    CHECK(s.step == 0);
  }

  TEST_CASE("scalar adam converges") {
    ScalarAdam opt;
    double x = 0.0;
    for (int k = 0; k < 200; ++k) x = opt.update(x, 2.0 * (x + 1.5), 0.05);
    CHECK(std::abs(x + 1.5) < 0.05);
  }
}

TEST_SUITE("polyak") {
  TEST_CASE("tau one copies, tau zero keeps") {
    DenseNetwork target = random_net({3, 4, 2}, 1);
    const DenseNetwork online = random_net({3, 4, 2}, 2);
    DenseNetwork keep = target;
    polyak_update(keep, online, 0.0);
    CHECK(flatten(keep.parameters()) == flatten(target.parameters()));
    polyak_update(target, online, 1.0);
    CHECK(flatten(target.parameters()) == flatten(online.parameters()));
  }

  TEST_CASE("scalar midpoint") {
    DenseNetwork target({1, 1}, Activation::relu, Activation::identity);
    DenseNetwork online = target;
    target.parameters().weights[0](0, 0) = 0.0;
    target.parameters().biases[0](0) = 0.0;
    online.parameters().weights[0](0, 0) = 2.0;
    online.parameters().biases[0](0) = 2.0;
    polyak_update(target, online, 0.5);
    CHECK(target.parameters().weights[0](0, 0) == 1.0);
    CHECK(target.parameters().biases[0](0) == 1.0);
  }

  TEST_CASE("result is a convex combination") {
    Rng rng(77);
    for (int k = 0; k < 20; ++k) {
      DenseNetwork target = random_net({3, 5, 2}, 100 + k);
      const DenseNetwork online = random_net({3, 5, 2}, 200 + k);
      const Vector t0 = flatten(target.parameters());
      const Vector o = flatten(online.parameters());
      polyak_update(target, online, rng.uniform(0.0, 1.0));
      const Vector t1 = flatten(target.parameters());
      for (Eigen::Index i = 0; i < t1.size(); ++i) {
        CHECK(t1[i] >= std::min(t0[i], o[i]));
        CHECK(t1[i] <= std::max(t0[i], o[i]));
      }
    }
  }

  TEST_CASE("architecture mismatch is a configuration error") {
    DenseNetwork target = random_net({3, 4, 2}, 1);
    CHECK_THROWS_AS(polyak_update(target, random_net({3, 5, 2}, 1), 0.5), ConfigurationError);
  }
}

TEST_SUITE("initialization and rng") {
  TEST_CASE("weights lie within the fan-in bound") {
    const DenseNetwork net = random_net({9, 16, 4}, 3);
    for (int l = 0; l < net.layer_count(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(net.layer_sizes()[static_cast<std::size_t>(l)]));
      CHECK(net.parameters().weights[l].cwiseAbs().maxCoeff() <= bound);
      CHECK(net.parameters().biases[l].cwiseAbs().maxCoeff() <= bound);
    }
  }

  TEST_CASE("same seed, same network; split streams differ") {
    CHECK(flatten(random_net({4, 8, 2}, 9).parameters()) == flatten(random_net({4, 8, 2}, 9).parameters()));
    CHECK(flatten(random_net({4, 8, 2}, 9).parameters()) != flatten(random_net({4, 8, 2}, 10).parameters()));
    const Rng root(5);
    Rng a = root.split("a"), a2 = root.split("a"), b = root.split("b");
    const double va = a.normal();
    CHECK(va == a2.normal());
    CHECK(va != b.normal());
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("byte round trip is exact") {
    Checkpoint ck;
    DenseNetwork net = random_net({4, 8, 2}, 12, Activation::tanh, Activation::sigmoid);
    AdamState s = AdamState::for_parameters(net.parameters());
    adam_step(net.parameters(), net.parameters(), s, 1e-3);
    ck.put("net", net);
    ck.put("opt", s);
    ck.put("config", std::string("a=1\nb=2\n"));
    ck.put("values", std::vector<double>{1.0, -0.0, 1e-300, std::numeric_limits<double>::infinity()});
    const std::string bytes = ck.serialize();
    const Checkpoint back = Checkpoint::deserialize(bytes);
    CHECK(back.serialize() == bytes);
    CHECK(flatten(back.network("net").parameters()) == flatten(net.parameters()));
    CHECK(back.network("net").output_activation() == Activation::sigmoid);
    CHECK(back.adam("opt").step == 1);
    CHECK(back.text("config") == "a=1\nb=2\n");
    CHECK(std::signbit(back.values("values")[1]));
  }

  TEST_CASE("header layout") {
    Checkpoint ck;
    ck.put("x", std::vector<double>{2.0});
    const std::string bytes = ck.serialize();
    CHECK(bytes.substr(0, 8) == "CSTREGCK");
    CHECK(static_cast<unsigned char>(bytes[8]) == 1);
    CHECK(bytes[9] == 0);
  }

  TEST_CASE("corrupted data is an artifact error") {
    Checkpoint ck;
    ck.put("x", std::vector<double>{2.0, 3.0});
    std::string bytes = ck.serialize();
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(Checkpoint::deserialize(bad_magic), ArtifactError);
    std::string bad_version = bytes;
    bad_version[8] = 9;
    CHECK_THROWS_AS(Checkpoint::deserialize(bad_version), ArtifactError);
    CHECK_THROWS_AS(Checkpoint::deserialize(bytes.substr(0, bytes.size() - 3)), ArtifactError);
    CHECK_THROWS_AS(Checkpoint::deserialize(bytes + "z"), ArtifactError);
  }

  TEST_CASE("missing or mistyped entries are artifact errors") {
    Checkpoint ck;
    ck.put("x", std::vector<double>{2.0});
    CHECK_THROWS_AS(ck.network("x"), ArtifactError);
    CHECK_THROWS_AS(ck.values("y"), ArtifactError);
  }
}

#include "discus/nn/adam.hpp"

#include <cmath>

#include "discus/core/error.hpp"
#include "discus/simd/kernels.hpp"

namespace discus::nn {

double step_lr(double lr0, int step, double gamma, int iteration) {
  return lr0 * std::pow(gamma, iteration / step);
}

std::size_t Adam::add_group(std::size_t size) {
  groups_.push_back(State{std::vector<float>(size, 0.0f), std::vector<float>(size, 0.0f)});
  return groups_.size() - 1;
}

void Adam::begin_step() { ++t_; }

void Adam::update(std::size_t group, std::span<const float> grad, std::span<float> param) {
  if (group >= groups_.size()) throw DimensionError("unknown optimizer group");
  State& st = groups_[group];
  if (grad.size() != st.m.size() || param.size() != st.m.size())
    throw DimensionError("optimizer group size mismatch");
  if (t_ == 0) throw Error("Adam::begin_step() must precede update()");
  simd::AdamStep step{cfg_.lr,
                      cfg_.beta1,
                      cfg_.beta2,
                      cfg_.eps,
                      static_cast<float>(1.0 - std::pow(static_cast<double>(cfg_.beta1), static_cast<double>(t_))),
                      static_cast<float>(1.0 - std::pow(static_cast<double>(cfg_.beta2), static_cast<double>(t_)))};
  simd::kernels().adam_update(param.size(), step, grad.data(), param.data(), st.m.data(), st.v.data());
}

}  // namespace discus::nn

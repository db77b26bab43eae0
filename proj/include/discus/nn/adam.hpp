#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace discus::nn {

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

// Learning rate lr0 * gamma^floor(iteration / step).
double step_lr(double lr0, int step, double gamma, int iteration);

// Adam over several independent parameter groups sharing one step counter.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Returns the group index.
  std::size_t add_group(std::size_t size);
  void set_lr(float lr) noexcept { cfg_.lr = lr; }
  float lr() const noexcept { return cfg_.lr; }
  long steps() const noexcept { return t_; }

  // Advances the step counter. Call once per iteration before update().
  void begin_step();
  void update(std::size_t group, std::span<const float> grad, std::span<float> param);

 private:
  struct State {
    std::vector<float> m;
    std::vector<float> v;
  };
  AdamConfig cfg_;
  std::vector<State> groups_;
  long t_ = 0;
};

}  // namespace discus::nn

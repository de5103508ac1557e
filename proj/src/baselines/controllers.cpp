#include "marlot/baselines/controllers.hpp"

namespace marlot::baselines {

marl::Checkpoint single_rl_train(const marl::TrainEnv& env,
                                 marl::TrainConfig cfg) {
  cfg.algo = marl::Algo::IndependentDdpg;
  return marl::train(env, cfg);
}

}  // namespace marlot::baselines

#pragma once

#include "marlot/marl/maddpg.hpp"

namespace marlot::baselines {

/// Independent single-agent RL baseline: same arena, same model shape, all
/// cooperative blocks removed (own-state critics, individual rewards).
marl::Checkpoint single_rl_train(const marl::TrainEnv& env,
                                 marl::TrainConfig cfg);

}  // namespace marlot::baselines

#pragma once

#include "transleg/convex_hull.hpp"
#include "transleg/csv.hpp"
#include "transleg/dynamics.hpp"
#include "transleg/energy.hpp"
#include "transleg/error.hpp"
#include "transleg/kinematics.hpp"
#include "transleg/model_io.hpp"
#include "transleg/reward_replay.hpp"
#include "transleg/rewards.hpp"
#include "transleg/robot_model.hpp"
#include "transleg/transform_planner.hpp"
#include "transleg/turn_sim.hpp"
#include "transleg/workspace.hpp"

#pragma once

#include "hifs/clifford.hpp"
#include "hifs/hmodule.hpp"
#include "hifs/ifs.hpp"
#include "hifs/point_set.hpp"
#include "hifs/render.hpp"
#include "hifs/run.hpp"
#include "hifs/scene.hpp"
#include "hifs/trajectory.hpp"

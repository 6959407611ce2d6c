#pragma once

#include "rcdamage/anchor_clustering.hpp"
#include "rcdamage/classifier_eval.hpp"
#include "rcdamage/cost_model.hpp"
#include "rcdamage/detector_eval.hpp"
#include "rcdamage/error.hpp"
#include "rcdamage/fusion.hpp"
#include "rcdamage/geometry.hpp"
#include "rcdamage/io_formats.hpp"
#include "rcdamage/pipeline.hpp"
#include "rcdamage/svg.hpp"
#include "rcdamage/version.hpp"
#include "rcdamage/yolo_decode.hpp"
#include "rcdamage/yolo_loss.hpp"

#ifndef ARTINFLUENCE_ARTINFLUENCE_HPP
#define ARTINFLUENCE_ARTINFLUENCE_HPP

#include "artinfluence/bow.hpp"
#include "artinfluence/core_model.hpp"
#include "artinfluence/cross_validation.hpp"
#include "artinfluence/embedding.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/influence.hpp"
#include "artinfluence/ingestion.hpp"
#include "artinfluence/lda.hpp"
#include "artinfluence/painting_distance.hpp"
#include "artinfluence/persist.hpp"
#include "artinfluence/svm.hpp"

#endif  // ARTINFLUENCE_ARTINFLUENCE_HPP

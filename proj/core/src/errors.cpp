/*
 * Copyright 2026 The DGCDR Toolkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dgcdr/errors.hpp"

namespace dgcdr {

Diverged::Diverged(int epoch)
    : Error("training diverged: non-finite loss at epoch " + std::to_string(epoch)),
      epoch_(epoch) {}

MalformedLine::MalformedLine(std::size_t line_no, const std::string& detail)
    : DataError("malformed line " + std::to_string(line_no) + ": " + detail),
      line_no_(line_no) {}

EmptyFile::EmptyFile(const std::string& path)
    : DataError("no valid interactions in " + path) {}

ExhaustedDataset::ExhaustedDataset(unsigned n_core)
    : DataError("n-core filtering with n=" + std::to_string(n_core) +
                " left a domain empty") {}

NoNegativeAvailable::NoNegativeAvailable(int user)
    : DataError("user " + std::to_string(user) + " has interacted with every item"),
      user_(user) {}

NoTestItems::NoTestItems(int user)
    : DataError("user " + std::to_string(user) + " has no held-out items") {}

EmptyRelevantSet::EmptyRelevantSet() : Error("relevant set is empty") {}

ShapeMismatch::ShapeMismatch(const std::string& op, long lhs_rows, long lhs_cols,
                             long rhs_rows, long rhs_cols)
    : Error(op + ": shape mismatch (" + std::to_string(lhs_rows) + "x" +
            std::to_string(lhs_cols) + " vs " + std::to_string(rhs_rows) + "x" +
            std::to_string(rhs_cols) + ")") {}

ZeroDimension::ZeroDimension() : Error("matrix dimension must be positive") {}

NonFiniteGradient::NonFiniteGradient(const std::string& parameter)
    : Error("non-finite gradient in parameter '" + parameter + "'"),
      parameter_(parameter) {}

}  // namespace dgcdr

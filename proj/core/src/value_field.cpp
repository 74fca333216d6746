#include "penbsde/value_field.hpp"

#include <stdexcept>
#include <string>

namespace penbsde {

NodeArray::NodeArray(std::size_t steps, bool retainHistory)
    : retain_(retainHistory), rows_(steps + 1) {}

std::span<const double> NodeArray::row(std::size_t k) const {
    if (!hasRow(k)) throw std::out_of_range("step " + std::to_string(k) + " is not retained");
    return rows_[k];
}

void NodeArray::storeRow(std::size_t k, std::span<const double> values) {
    if (k >= rows_.size()) throw std::out_of_range("step " + std::to_string(k) + " beyond horizon");
    if (!retain_ && k != 0) return;
    rows_[k].assign(values.begin(), values.end());
}

ValueField::ValueField(std::size_t steps, bool retainHistory)
    : y(steps, retainHistory),
      z(steps, retainHistory),
      obstaclePush(steps, retainHistory),
      constraintPush(steps, retainHistory),
      rate(steps, retainHistory) {}

}  // namespace penbsde

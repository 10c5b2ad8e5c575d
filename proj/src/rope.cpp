#include "fractalssm/rope.hpp"

#include <cmath>

namespace fractalssm {

double rope_theta(int d_head, int t) {
    return std::pow(10000.0, -static_cast<double>(t) / (d_head / 2));
}

RopeTable make_rope_table(int d_head, int max_len, double pos_scale) {
    if (d_head <= 0 || d_head % 2 != 0)
        throw InvalidArgument("rope head dimension must be positive and even");
    if (max_len <= 0) throw InvalidArgument("rope table length must be positive");
    if (!(pos_scale > 0.0)) throw InvalidArgument("rope position scale must be positive");
    RopeTable table;
    table.d_head = d_head;
    table.max_len = max_len;
    const int half = d_head / 2;
    table.cos_v.resize(static_cast<size_t>(max_len) * half);
    table.sin_v.resize(static_cast<size_t>(max_len) * half);
    for (int pos = 0; pos < max_len; ++pos)
        for (int t = 0; t < half; ++t) {
            const double angle = rope_theta(d_head, t) * (pos_scale * pos);
            table.cos_v[table.index(pos, t)] = std::cos(angle);
            table.sin_v[table.index(pos, t)] = std::sin(angle);
        }
    return table;
}

namespace {

void rotate(const RopeTable& table, double* v, int pos, double sign) {
    if (pos < 0 || pos >= table.max_len) throw OutOfRange("rope position out of table range");
    const int half = table.d_head / 2;
    for (int t = 0; t < half; ++t) {
        const double c = table.cos_v[table.index(pos, t)];
        const double s = sign * table.sin_v[table.index(pos, t)];
        const double a = v[2 * t], b = v[2 * t + 1];
        v[2 * t] = a * c - b * s;
        v[2 * t + 1] = a * s + b * c;
    }
}

}  // namespace

void apply_rope(const RopeTable& table, double* v, int pos) { rotate(table, v, pos, 1.0); }
void apply_rope_inverse(const RopeTable& table, double* v, int pos) { rotate(table, v, pos, -1.0); }

std::vector<double> rope_applied(const RopeTable& table, std::vector<double> v, int pos) {
    if (static_cast<int>(v.size()) != table.d_head)
        throw ShapeMismatch("vector length does not match rope head dimension");
    apply_rope(table, v.data(), pos);
    return v;
}

double rope_score(const RopeTable& table, const std::vector<double>& q,
                  const std::vector<double>& k, int n, int m) {
    const std::vector<double> qr = rope_applied(table, q, n);
    const std::vector<double> kr = rope_applied(table, k, m);
    double acc = 0.0;
    for (size_t i = 0; i < qr.size(); ++i) acc += qr[i] * kr[i];
    return acc;
}

void embed_positions(const RopeTable& table, SequenceBatch& batch) {
    if (batch.channels != table.d_head)
        throw ShapeMismatch("batch channels do not match rope head dimension");
    if (batch.length > table.max_len) throw OutOfRange("sequence longer than rope table");
    for (int b = 0; b < batch.batch; ++b)
        for (int t = 0; t < batch.length; ++t)
            apply_rope(table, &batch.at(b, t, 0), t);
}

}  // namespace fractalssm

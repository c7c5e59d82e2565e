#pragma once
// SVG line plots over sweep CSVs: accuracy vs phi, the two AUC measures vs
// phi, and the taste-1 share vs f1 with the y = x reference diagonal.

#include <string>

namespace icfsim {

enum class FigureKind { OmegaPhi, AucPhi, Omega1F1 };

// Accepts "omega-phi", "auc-phi", "omega1-f1".
FigureKind figure_kind_from_name(const std::string& name);

// Renders the aggregate (instance = mean) rows of a sweep CSV. Throws on
// missing columns or when no plottable rows exist.
std::string render_plot(const std::string& csv_text, FigureKind kind);

void render_plot_file(const std::string& csv_path, FigureKind kind, const std::string& out_path);

}  // namespace icfsim

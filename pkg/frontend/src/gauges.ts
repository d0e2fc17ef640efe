/** Coverage gauges and gap list.
 *
 * The UI owns no analytics: each gauge carries the server's exact ratio in
 * its data-value attribute and only formats it for display, so rendered
 * state can be compared value-for-value with the coverage endpoint.
 */

import { el } from "./dom.js";
import type { CoveragePayload } from "./types.js";

export function formatPercent(ratio: number): string {
  return `${Math.round(ratio * 100)}%`;
}

function gauge(label: string, field: string, ratio: number): HTMLElement {
  const meter = el("div", { class: "gauge-meter" });
  const fill = el("div", { class: "gauge-fill" });
  fill.style.width = `${Math.max(0, Math.min(1, ratio)) * 100}%`;
  meter.append(fill);
  return el(
    "div",
    { class: "gauge", "data-field": field, "data-value": String(ratio) },
    el("span", { class: "gauge-label" }, label),
    meter,
    el("span", { class: "gauge-percent" }, formatPercent(ratio)),
  );
}

export function renderGauges(coverage: CoveragePayload): HTMLElement {
  const root = el("section", { class: "gauges" });
  root.append(
    gauge("Phase coverage", "phase_coverage", coverage.phase_coverage),
    gauge("Detection realized", "detection_realized", coverage.detection_realized),
    gauge("Detection opportunity", "detection_opportunity", coverage.detection_opportunity),
  );

  const gaps = el("div", { class: "gap-list" });
  if (coverage.gaps.length === 0) {
    gaps.append(el("p", { class: "gap-none" }, "No detection gaps."));
  } else {
    const list = el("ul", {});
    for (const gap of coverage.gaps) {
      list.append(
        el(
          "li",
          { class: "gap-entry", "data-technique": gap.technique_id, "data-reason": gap.reason },
          el("code", {}, gap.technique_id),
          ` ${gap.reason === "NoMappedDetection" ? "has no cataloged detection" : "recorded no detection hit"}`,
        ),
      );
    }
    gaps.append(el("h3", {}, `Gaps (${coverage.gaps.length})`), list);
  }
  root.append(gaps);
  return root;
}

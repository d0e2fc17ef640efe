/** Matrix rendering: phase columns in server order, tactic groups, technique cells. */

import { clear, el } from "./dom.js";
import { heatColor, heatTextColor } from "./palette.js";
import type { EntityDetail, MatrixPayload, NameRef } from "./types.js";

export interface MatrixHandlers {
  onTechniqueClick?: (techniqueId: string, phaseId: string, cell: HTMLElement) => void;
}

function techniqueCell(ref: NameRef, phaseId: string, handlers: MatrixHandlers): HTMLElement {
  const cell = el(
    "button",
    {
      class: "technique-cell",
      type: "button",
      "data-technique": ref.id,
      "data-phase": phaseId,
    },
    el("code", {}, ref.id),
    el("span", { class: "technique-name" }, ref.name ?? ""),
  );
  if (handlers.onTechniqueClick) {
    cell.addEventListener("click", () => handlers.onTechniqueClick!(ref.id, phaseId, cell));
  }
  return cell;
}

export function renderMatrix(payload: MatrixPayload, handlers: MatrixHandlers = {}): HTMLElement {
  if (payload.columns.length === 0) {
    return el(
      "section",
      { class: "matrix matrix-empty" },
      el("p", { class: "empty-state" }, "This corpus has no phases yet. Load a corpus with content to explore the matrix."),
    );
  }
  const root = el("section", { class: "matrix" });
  // Column order is the kill-chain order the server sent; never re-sort.
  for (const column of payload.columns) {
    const columnEl = el(
      "div",
      { class: "matrix-column", "data-phase": column.phase.id },
      el(
        "header",
        { class: "phase-header" },
        el("h2", {}, column.phase.name),
        el("code", {}, column.phase.id),
      ),
    );
    for (const cell of column.cells) {
      const group = el(
        "div",
        { class: "tactic-group", "data-tactic": cell.tactic.id },
        el(
          "h3",
          { class: cell.tactic.provisional ? "tactic-name provisional" : "tactic-name" },
          cell.tactic.name ?? cell.tactic.id,
        ),
      );
      for (const technique of cell.techniques) {
        group.append(techniqueCell(technique, column.phase.id, handlers));
      }
      columnEl.append(group);
    }
    if (column.unassigned.length > 0) {
      const group = el("div", { class: "tactic-group" }, el("h3", { class: "tactic-name" }, "(no tactic)"));
      for (const technique of column.unassigned) {
        group.append(techniqueCell(technique, column.phase.id, handlers));
      }
      columnEl.append(group);
    }
    root.append(columnEl);
  }
  return root;
}

/** Shade technique cells by layer score; cells without a score reset to default. */
export function applyHeat(matrixEl: HTMLElement, scores: Map<string, number>): void {
  matrixEl.querySelectorAll<HTMLElement>(".technique-cell").forEach((cell) => {
    const id = cell.dataset.technique ?? "";
    const score = scores.get(id);
    if (score === undefined) {
      cell.style.removeProperty("background-color");
      cell.style.removeProperty("color");
      cell.removeAttribute("data-score");
    } else {
      cell.style.backgroundColor = heatColor(score);
      cell.style.color = heatTextColor(score);
      cell.setAttribute("data-score", String(score));
    }
  });
}

export function renderEntityPanel(detail: EntityDetail): HTMLElement {
  const panel = el(
    "aside",
    { class: "entity-panel", "data-entity": detail.id },
    el("h2", {}, detail.name),
    el("p", { class: "entity-meta" }, `${detail.id} · ${detail.kind}`),
  );
  if (detail.provisional) {
    panel.append(el("p", { class: "provisional-note" }, "Provisional placeholder entry."));
  }
  if (detail.description) {
    panel.append(el("p", { class: "entity-description" }, detail.description));
  }
  const sections: Array<[string, NameRef[] | undefined]> = [
    ["Detections", detail.detections],
    ["Mitigations", detail.mitigations],
    ["Tools", detail.tools],
    ["Phases", detail.phases],
    ["Tactics", detail.tactics],
    ["Sub-techniques", detail.sub_techniques],
    ["Techniques", detail.techniques],
  ];
  for (const [label, refs] of sections) {
    if (!refs || refs.length === 0) continue;
    const list = el("ul", {});
    for (const ref of refs) {
      list.append(el("li", {}, el("code", {}, ref.id), ` ${ref.name ?? ""}`));
    }
    panel.append(el("h3", {}, label), list);
  }
  return panel;
}

export function showPanel(container: HTMLElement, panel: HTMLElement): void {
  clear(container);
  container.append(panel);
}

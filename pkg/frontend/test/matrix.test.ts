import { describe, expect, it, vi } from "vitest";

import { applyHeat, renderEntityPanel, renderMatrix } from "../src/matrix.js";
import { seedMatrix } from "./fixtures.js";

describe("renderMatrix", () => {
  it("renders the four phase columns in canonical order", () => {
    const matrix = renderMatrix(seedMatrix);
    const headers = [...matrix.querySelectorAll(".phase-header h2")].map((h) => h.textContent);
    expect(headers).toEqual(["Preparation", "Promotion", "Engagement", "Concealment"]);
    const phases = [...matrix.querySelectorAll(".matrix-column")].map(
      (c) => (c as HTMLElement).dataset.phase,
    );
    expect(phases).toEqual(["P0001", "P0002", "P0003", "P0004"]);
  });

  it("renders every technique cell exactly once", () => {
    const matrix = renderMatrix(seedMatrix);
    const ids = [...matrix.querySelectorAll(".technique-cell")].map(
      (c) => (c as HTMLElement).dataset.technique,
    );
    expect(ids).toHaveLength(13);
    expect(new Set(ids).size).toBe(13);
  });

  it("reports clicks with the cell's phase", () => {
    const onTechniqueClick = vi.fn();
    const matrix = renderMatrix(seedMatrix, { onTechniqueClick });
    const cell = matrix.querySelector<HTMLElement>('[data-technique="T0056"]');
    cell!.click();
    expect(onTechniqueClick).toHaveBeenCalledWith("T0056", "P0004", cell);
  });

  it("shows an empty state for a corpus with no phases", () => {
    const matrix = renderMatrix({ columns: [], orphan_tactics: [] });
    expect(matrix.querySelector(".empty-state")).not.toBeNull();
    expect(matrix.querySelectorAll(".matrix-column")).toHaveLength(0);
  });

  it("marks provisional tactics", () => {
    const matrix = renderMatrix(seedMatrix);
    const tactic = matrix.querySelector(".tactic-name");
    expect(tactic?.classList.contains("provisional")).toBe(true);
  });
});

describe("applyHeat", () => {
  it("shades scored cells and records the score", () => {
    const matrix = renderMatrix(seedMatrix);
    applyHeat(matrix, new Map([["T0003", 100], ["T0012", 40]]));
    const hot = matrix.querySelector<HTMLElement>('[data-technique="T0003"]');
    const warm = matrix.querySelector<HTMLElement>('[data-technique="T0012"]');
    const cold = matrix.querySelector<HTMLElement>('[data-technique="T0056"]');
    expect(hot!.dataset.score).toBe("100");
    expect(warm!.dataset.score).toBe("40");
    expect(cold!.dataset.score).toBeUndefined();
    expect(hot!.style.backgroundColor).not.toBe(warm!.style.backgroundColor);
  });

  it("clears shading when a score disappears", () => {
    const matrix = renderMatrix(seedMatrix);
    applyHeat(matrix, new Map([["T0003", 100]]));
    applyHeat(matrix, new Map());
    const cell = matrix.querySelector<HTMLElement>('[data-technique="T0003"]');
    expect(cell!.dataset.score).toBeUndefined();
    expect(cell!.style.backgroundColor).toBe("");
  });
});

describe("renderEntityPanel", () => {
  it("shows description and related detections and mitigations", () => {
    const panel = renderEntityPanel({
      kind: "technique",
      id: "T0012",
      name: "Fraudulent Website Creation",
      description: "Standing up sites that imitate legitimate services or brokers.",
      detections: [{ id: "D0003.001", name: "Suspicious Domain Lifecycle" }],
      mitigations: [{ id: "M0001", name: "Takedown Playbook" }],
    });
    expect(panel.textContent).toContain("Fraudulent Website Creation");
    expect(panel.textContent).toContain("Standing up sites");
    expect(panel.textContent).toContain("D0003.001");
    expect(panel.textContent).toContain("Takedown Playbook");
  });
});

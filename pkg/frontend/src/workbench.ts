/** Incident annotation session: pick a cell, describe what was seen, post it,
 * and watch the coverage gauges, gap list, and heatmap refresh from the server.
 */

import { ApiError, FistApi } from "./api.js";
import { clear, el } from "./dom.js";
import { renderGauges } from "./gauges.js";
import { applyHeat, renderMatrix } from "./matrix.js";
import type { IncidentPayload, MatrixPayload } from "./types.js";

interface Selection {
  techniqueId: string;
  phaseId: string;
  cell: HTMLElement;
}

export class Workbench {
  private selection: Selection | null = null;
  private matrixEl: HTMLElement | null = null;
  private incident: IncidentPayload | null = null;

  constructor(
    private readonly api: FistApi,
    private readonly incidentId: string,
    private readonly root: HTMLElement,
  ) {}

  async load(): Promise<void> {
    const [incident, matrix] = await Promise.all([
      this.api.getIncident(this.incidentId),
      this.api.getMatrix(),
    ]);
    this.incident = incident;
    this.renderShell(matrix);
    await this.refreshAnalytics();
  }

  private renderShell(matrix: MatrixPayload): void {
    clear(this.root);
    const incident = this.incident!;
    this.matrixEl = renderMatrix(matrix, {
      onTechniqueClick: (techniqueId, phaseId, cell) => this.select(techniqueId, phaseId, cell),
    });

    this.root.append(
      el(
        "header",
        { class: "workbench-header" },
        el("h1", {}, incident.title),
        el("p", { class: "incident-meta" }, `${incident.incident_id} · created ${incident.created_at}`),
        el(
          "nav",
          { class: "export-buttons" },
          this.downloadButton("Export layer", this.api.layerUrl(this.incidentId)),
          this.downloadButton("Export report", this.api.reportUrl(this.incidentId)),
          this.downloadButton("Export bundle", this.api.stixUrl(this.incidentId)),
        ),
      ),
      el("div", { class: "workbench-analytics" }),
      el("div", { class: "workbench-form" }),
      this.matrixEl,
      el("section", { class: "observation-log" }),
    );
    this.renderForm();
    this.renderLog();
  }

  private downloadButton(label: string, href: string): HTMLElement {
    return el("a", { class: "export-button", href, target: "_blank", rel: "noopener" }, label);
  }

  select(techniqueId: string, phaseId: string, cell: HTMLElement): void {
    this.matrixEl
      ?.querySelectorAll(".technique-cell.selected")
      .forEach((previous) => previous.classList.remove("selected"));
    this.clearInlineErrors();
    cell.classList.add("selected");
    this.selection = { techniqueId, phaseId, cell };
    this.renderForm();
  }

  private renderForm(): void {
    const host = this.root.querySelector<HTMLElement>(".workbench-form");
    if (!host) return;
    clear(host);
    if (!this.selection) {
      host.append(el("p", { class: "form-hint" }, "Select a technique cell to annotate this incident."));
      return;
    }
    const { techniqueId, phaseId } = this.selection;
    const behavior = el("textarea", {
      class: "behavior-input",
      placeholder: "Observed behavior",
      rows: "2",
    });
    const hits = el("input", {
      class: "hits-input",
      type: "text",
      placeholder: "Detection hits, comma separated (e.g. D0004.003)",
    });
    const submit = el("button", { class: "submit-observation", type: "button" }, "Record observation");
    submit.addEventListener("click", () => {
      void this.submit(behavior.value, hits.value);
    });
    host.append(
      el(
        "form",
        { class: "observation-form" },
        el("p", { class: "form-target" }, "Annotating ", el("code", {}, techniqueId), " in ", el("code", {}, phaseId)),
        behavior,
        hits,
        submit,
      ),
    );
  }

  async submit(behavior: string, hitsText: string): Promise<void> {
    if (!this.selection) return;
    const { techniqueId, phaseId, cell } = this.selection;
    const hits = hitsText
      .split(",")
      .map((hit) => hit.trim())
      .filter((hit) => hit.length > 0);
    this.clearInlineErrors();
    try {
      this.incident = await this.api.addObservation(this.incidentId, {
        technique: techniqueId,
        phase: phaseId,
        observed_behavior: behavior,
        detection_hits: hits,
      });
    } catch (error) {
      if (error instanceof ApiError) {
        this.showInlineError(cell, error);
        return;
      }
      throw error;
    }
    this.renderLog();
    await this.refreshAnalytics();
  }

  /** Rejected writes surface on the cell that caused them. */
  private showInlineError(cell: HTMLElement, error: ApiError): void {
    const note = el(
      "p",
      { class: "cell-error", role: "alert", "data-code": error.code },
      `${error.code}: ${error.message}`,
    );
    cell.insertAdjacentElement("afterend", note);
  }

  private clearInlineErrors(): void {
    this.root.querySelectorAll(".cell-error").forEach((node) => node.remove());
  }

  /** Gauges, gap list, and heat shading all come back from the server. */
  async refreshAnalytics(): Promise<void> {
    const [coverage, layer] = await Promise.all([
      this.api.getCoverage(this.incidentId),
      this.api.getLayer(this.incidentId),
    ]);
    const host = this.root.querySelector<HTMLElement>(".workbench-analytics");
    if (host) {
      clear(host);
      host.append(renderGauges(coverage));
    }
    if (this.matrixEl) {
      const scores = new Map(layer.entries.map((entry) => [entry.technique_id, entry.score]));
      applyHeat(this.matrixEl, scores);
    }
  }

  private renderLog(): void {
    const host = this.root.querySelector<HTMLElement>(".observation-log");
    if (!host || !this.incident) return;
    clear(host);
    host.append(el("h3", {}, `Observations (${this.incident.observations.length})`));
    if (this.incident.observations.length === 0) {
      host.append(el("p", { class: "empty-state" }, "Nothing recorded yet."));
      return;
    }
    const list = el("ol", { class: "observation-entries" });
    for (const obs of this.incident.observations) {
      const hits = obs.detection_hits.length > 0 ? ` · hits: ${obs.detection_hits.join(", ")}` : " · no hits";
      list.append(
        el(
          "li",
          { "data-sequence": String(obs.sequence) },
          el("code", {}, obs.technique),
          ` in ${obs.phase}`,
          obs.observed_behavior ? `: ${obs.observed_behavior}` : "",
          hits,
        ),
      );
    }
    host.append(list);
  }
}

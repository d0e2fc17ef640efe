/** Entry point: hash routing between the matrix explorer and the incident
 * workbench, incident management sidebar, and the offline banner.
 *
 * Routes: ``#/matrix`` (default) and ``#/incident/<id>``.
 */

import { ApiError, FistApi } from "./api.js";
import { clear, el } from "./dom.js";
import { renderEntityPanel, renderMatrix, showPanel } from "./matrix.js";
import { Workbench } from "./workbench.js";

const api = new FistApi();

function banner(message: string): HTMLElement {
  return el("div", { class: "offline-banner", role: "alert" }, message);
}

async function renderMatrixView(root: HTMLElement): Promise<void> {
  clear(root);
  const [manifest, matrix, incidents] = await Promise.all([
    api.getManifest(),
    api.getMatrix(),
    api.listIncidents(),
  ]);

  const detail = el("div", { class: "detail-host" });
  const matrixEl = renderMatrix(matrix, {
    onTechniqueClick: async (techniqueId) => {
      try {
        showPanel(detail, renderEntityPanel(await api.getEntity(techniqueId)));
      } catch (error) {
        if (error instanceof ApiError) {
          showPanel(detail, el("aside", { class: "entity-panel" }, `${error.code}: ${error.message}`));
        } else {
          showPanel(detail, banner("Service unreachable."));
        }
      }
    },
  });

  const incidentList = el("ul", { class: "incident-list" });
  for (const id of incidents) {
    const link = el("a", { href: `#/incident/${encodeURIComponent(id)}` }, id);
    incidentList.append(el("li", {}, link));
  }

  const idInput = el("input", { type: "text", placeholder: "incident id (e.g. case-7)" });
  const titleInput = el("input", { type: "text", placeholder: "title" });
  const createError = el("p", { class: "create-error" });
  const createButton = el("button", { type: "button" }, "Start incident");
  createButton.addEventListener("click", async () => {
    createError.textContent = "";
    try {
      const created = await api.createIncident({
        incident_id: idInput.value.trim(),
        title: titleInput.value.trim() || idInput.value.trim(),
      });
      window.location.hash = `#/incident/${encodeURIComponent(created.incident_id)}`;
    } catch (error) {
      createError.textContent =
        error instanceof ApiError ? `${error.code}: ${error.message}` : "Service unreachable.";
    }
  });

  root.append(
    el(
      "header",
      { class: "app-header" },
      el("h1", {}, "FIST Navigator"),
      el(
        "p",
        { class: "corpus-meta" },
        `corpus ${manifest.corpus_version} · ${manifest.actual.techniques} techniques · ` +
          `${manifest.actual.detections} detections · digest ${manifest.source_digest.slice(0, 12)}`,
      ),
    ),
    el(
      "div",
      { class: "matrix-layout" },
      matrixEl,
      el(
        "aside",
        { class: "sidebar" },
        detail,
        el(
          "section",
          { class: "incident-manager" },
          el("h3", {}, "Incidents"),
          incidents.length ? incidentList : el("p", { class: "empty-state" }, "No incidents stored."),
          el("div", { class: "incident-create" }, idInput, titleInput, createButton, createError),
        ),
      ),
    ),
  );
}

async function renderWorkbenchView(root: HTMLElement, incidentId: string): Promise<void> {
  clear(root);
  const back = el("a", { class: "back-link", href: "#/matrix" }, "< back to matrix");
  const host = el("div", { class: "workbench-host" });
  root.append(back, host);
  await new Workbench(api, incidentId, host).load();
}

export async function route(root: HTMLElement): Promise<void> {
  const hash = window.location.hash || "#/matrix";
  const incidentMatch = /^#\/incident\/(.+)$/.exec(hash);
  try {
    if (incidentMatch) {
      await renderWorkbenchView(root, decodeURIComponent(incidentMatch[1]));
    } else {
      await renderMatrixView(root);
    }
  } catch (error) {
    clear(root);
    if (error instanceof ApiError) {
      root.append(banner(`${error.code}: ${error.message}`));
    } else {
      root.append(banner("Service unreachable. Start it with: fist serve"));
    }
  }
}

export function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  window.addEventListener("hashchange", () => void route(root));
  void route(root);
}

// In the browser the module runs at load; tests import and drive route() themselves.
if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}

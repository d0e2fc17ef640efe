/** Thin typed client over the knowledge-base JSON API.
 *
 * The UI computes nothing itself: every number it shows comes back from
 * these calls, so views can be checked value-for-value against responses.
 */

import type {
  CoveragePayload,
  EntityDetail,
  IncidentDraft,
  IncidentPayload,
  LayerPayload,
  ManifestPayload,
  MatrixPayload,
  ObservationDraft,
} from "./types.js";

/** Error body the service sends with every 4xx/5xx. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly subject: string | null = null,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(response.status, body.code ?? "Error", body.message ?? response.statusText, body.subject ?? null);
  } catch {
    return new ApiError(response.status, "Error", response.statusText);
  }
}

export class FistApi {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  getManifest(): Promise<ManifestPayload> {
    return this.request("/api/corpus/manifest");
  }

  getMatrix(): Promise<MatrixPayload> {
    return this.request("/api/matrix");
  }

  getEntity(id: string): Promise<EntityDetail> {
    return this.request(`/api/entities/${encodeURIComponent(id)}`);
  }

  listIncidents(): Promise<string[]> {
    return this.request("/api/incidents");
  }

  getIncident(id: string): Promise<IncidentPayload> {
    return this.request(`/api/incidents/${encodeURIComponent(id)}`);
  }

  createIncident(draft: IncidentDraft): Promise<IncidentPayload> {
    return this.request("/api/incidents", {
      method: "POST",
      body: JSON.stringify(draft),
    });
  }

  addObservation(incidentId: string, draft: ObservationDraft): Promise<IncidentPayload> {
    return this.request(`/api/incidents/${encodeURIComponent(incidentId)}/observations`, {
      method: "POST",
      body: JSON.stringify(draft),
    });
  }

  getCoverage(incidentId: string): Promise<CoveragePayload> {
    return this.request(`/api/incidents/${encodeURIComponent(incidentId)}/coverage`);
  }

  getLayer(incidentId: string): Promise<LayerPayload> {
    return this.request(`/api/export/layer/${encodeURIComponent(incidentId)}`);
  }

  /** Download targets for the export buttons (served artifacts, not UI renders). */
  layerUrl(incidentId: string): string {
    return `${this.baseUrl}/api/export/layer/${encodeURIComponent(incidentId)}`;
  }

  reportUrl(incidentId: string, format: "markdown" | "json" = "markdown"): string {
    return `${this.baseUrl}/api/incidents/${encodeURIComponent(incidentId)}/report?format=${format}`;
  }

  stixUrl(incidentId?: string): string {
    const suffix = incidentId ? `?incident=${encodeURIComponent(incidentId)}` : "";
    return `${this.baseUrl}/api/export/stix${suffix}`;
  }
}

/** Frozen API payloads used by the UI tests.
 *
 * Shapes and values mirror what the service returns for the bundled seed
 * corpus and the case-study incident (13 observations, every one with its
 * detection hit recorded).
 */

import type {
  CoveragePayload,
  IncidentPayload,
  LayerPayload,
  MatrixPayload,
  NameRef,
} from "../src/types.js";

function refs(pairs: Array<[string, string]>): NameRef[] {
  return pairs.map(([id, name]) => ({ id, name }));
}

export const seedMatrix: MatrixPayload = {
  columns: [
    {
      phase: { id: "P0001", name: "Preparation", order: 1 },
      cells: [
        {
          tactic: { id: "TA0001", name: "Asset Preparation", provisional: true },
          techniques: refs([
            ["T0003", "Social Media Analysis"],
            ["T0009.002", "Fake Investment Text Creation"],
            ["T0010.001", "Fake Account Creation"],
            ["T0012", "Fraudulent Website Creation"],
          ]),
        },
      ],
      unassigned: [],
    },
    {
      phase: { id: "P0002", name: "Promotion", order: 2 },
      cells: [
        {
          tactic: { id: "TA0002", name: "Lure Distribution", provisional: true },
          techniques: refs([
            ["T0014.001", "Social Media Advertising"],
            ["T0017.001", "Exploiting Greed"],
            ["T0020.003", "Impersonating Celebrities"],
          ]),
        },
      ],
      unassigned: [],
    },
    {
      phase: { id: "P0003", name: "Engagement", order: 3 },
      cells: [
        {
          tactic: { id: "TA0003", name: "Victim Manipulation", provisional: true },
          techniques: refs([
            ["T0021.001", "Investment App Download"],
            ["T0033", "Fund Transfer Requests"],
            ["T0034.002", "Direct Fund Transfer"],
          ]),
        },
      ],
      unassigned: [],
    },
    {
      phase: { id: "P0004", name: "Concealment", order: 4 },
      cells: [
        {
          tactic: { id: "TA0004", name: "Trace Elimination", provisional: true },
          techniques: refs([
            ["T0047.003", "Shell Company Usage"],
            ["T0050.002", "Domain Deletion"],
            ["T0056", "Cryptocurrency Usage"],
          ]),
        },
      ],
      unassigned: [],
    },
  ],
  orphan_tactics: [],
};

export const caseRows: Array<[string, string, string]> = [
  ["T0003", "P0001", "D0002.001"],
  ["T0009.002", "P0001", "D0001.010"],
  ["T0010.001", "P0001", "D0001.001"],
  ["T0012", "P0001", "D0003.001"],
  ["T0014.001", "P0002", "D0002.001"],
  ["T0017.001", "P0002", "D0001.012"],
  ["T0020.003", "P0002", "D0001.002"],
  ["T0021.001", "P0003", "D0003.002"],
  ["T0033", "P0003", "D0004.003"],
  ["T0034.002", "P0003", "D0004.001"],
  ["T0047.003", "P0004", "D0004.007"],
  ["T0050.002", "P0004", "D0003.001"],
  ["T0056", "P0004", "D0004.008"],
];

export function emptyIncident(id = "wb-1"): IncidentPayload {
  return {
    incident_id: id,
    title: "Workbench session",
    summary: "",
    created_at: "2025-03-01T12:00:00Z",
    observations: [],
  };
}

export const fullCoverage: CoveragePayload = {
  phase_coverage: 1.0,
  phases_hit: ["P0001", "P0002", "P0003", "P0004"],
  detection_opportunity: 1.0,
  detection_realized: 1.0,
  gaps: [],
};

export const emptyCoverage: CoveragePayload = {
  phase_coverage: 0.0,
  phases_hit: [],
  detection_opportunity: 0.0,
  detection_realized: 0.0,
  gaps: [],
};

export function fullLayer(id = "wb-1"): LayerPayload {
  return {
    name: `Incident ${id} coverage`,
    corpus_version: "0.1.0",
    entries: caseRows.map(([technique]) => ({
      technique_id: technique,
      score: 100,
      comment: "observed",
    })),
  };
}

export const emptyLayer: LayerPayload = {
  name: "Incident wb-1 coverage",
  corpus_version: "0.1.0",
  entries: [],
};

/**
 * Block palette: one entry per constructor the active configuration offers.
 *
 * The entry list mirrors the configuration's constructor set exactly — nothing
 * added, nothing hidden. Joint summaries (genders and starting types) come
 * from the service itself: we add each constructor once to a throwaway session
 * and record what the service reports, so the palette can never disagree with
 * the engine about a block's joints.
 */

import { ApiClient, ConfigDoc, JointInfo, JsonRing } from "./api.js";

export interface PaletteEntry {
  consName: string;
  /** Cross-section rings for the thumbnail, in form coordinates. */
  thumbnail: Ring[];
  /** Joints as the service lists them for a fresh block: gender + type. */
  joints: JointSummary[];
}

export interface JointSummary {
  slot: string; // "male", "arg0", ...
  gender: "male" | "female";
  type: string;
}

export type Point = { x: number; y: number };
export type Ring = Point[];

/** Parse a fraction string ("-43/100", "1") to a float for display purposes. */
export function parseFrac(text: string): number {
  const slash = text.indexOf("/");
  if (slash < 0) {
    return Number(text);
  }
  return Number(text.slice(0, slash)) / Number(text.slice(slash + 1));
}

function toRing(ring: JsonRing): Ring {
  return ring.map(([x, y]) => ({ x: parseFrac(x), y: parseFrac(y) }));
}

/** Head constructor of a printed type ("List (List a)" -> "List"). */
export function headCons(typeText: string): string {
  const trimmed = typeText.trim();
  const space = trimmed.indexOf(" ");
  return space < 0 ? trimmed : trimmed.slice(0, space);
}

function slotOf(ref: string): string {
  const dot = ref.indexOf(".");
  return dot < 0 ? ref : ref.slice(dot + 1);
}

/**
 * Thumbnail geometry for a block: the rigid rings of the form of its male
 * joint's type, when that type starts with a constructor the configuration
 * maps to a form. Blocks whose male type is a bare variable (or which have no
 * male joint) fall back to an empty ring list; the renderer then draws just
 * the alignment frame. Display-only — fit verdicts never consult this.
 */
function thumbnailRings(config: ConfigDoc, joints: JointInfo[]): Ring[] {
  const male = joints.find((j) => j.gender === "male");
  if (!male) {
    return [];
  }
  const form = config.typeConsMapping[headCons(male.type)];
  if (!form) {
    return [];
  }
  return form.rigid.map(toRing);
}

/**
 * Build the palette for `configId`. Probes a throwaway session so every joint
 * summary is the service's own answer.
 */
export async function buildPalette(
  api: ApiClient,
  configId: string,
): Promise<PaletteEntry[]> {
  const { config } = await api.getConfig(configId);
  const names = Object.keys(config.blockMapping).sort();
  const probe = await api.createSession(configId);
  const entries: PaletteEntry[] = [];
  for (const consName of names) {
    const added = await api.addBlock(probe.sessionId, consName);
    entries.push({
      consName,
      thumbnail: thumbnailRings(config, added.joints),
      joints: added.joints.map((j) => ({
        slot: slotOf(j.ref),
        gender: j.gender,
        type: j.type,
      })),
    });
  }
  return entries;
}

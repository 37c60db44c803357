/** Typed wrappers over the catalog endpoints. */

export interface CatalogEntry {
  id: string;
  label: string;
  category: "alphabet" | "word" | "sentence";
  handedness: "left" | "right" | "both";
  arity: number;
}

export interface TemplateHand {
  side: string;
  wrist: number[];
  fingers: Record<string, Record<string, number[]>>;
}

export interface Template {
  id: string;
  label: string;
  category: string;
  handedness: string;
  poses: Array<{ hands: TemplateHand[] }>;
  translations: number[][];
}

export async function fetchCatalog(baseUrl: string): Promise<CatalogEntry[]> {
  const response = await fetch(`${baseUrl}/signs`);
  if (!response.ok) throw new Error(`GET /signs -> ${response.status}`);
  return (await response.json()) as CatalogEntry[];
}

export async function fetchTemplate(baseUrl: string, id: string): Promise<Template> {
  const response = await fetch(`${baseUrl}/signs/${encodeURIComponent(id)}`);
  if (!response.ok) throw new Error(`GET /signs/${id} -> ${response.status}`);
  return (await response.json()) as Template;
}

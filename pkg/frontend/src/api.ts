/** Typed client for the completion service wire format. */

export interface WireOption {
  token: string;
  category: string; // preterminal name, or "" for a literal word
  features: Record<string, string>;
}

export interface WireAntecedent {
  position: number;
  features: Record<string, string>;
}

export interface WireCategory {
  kind: string;
  name?: string;
  token?: string;
  features?: Record<string, string>;
}

export interface WireTreeNode {
  kind: "node";
  category: WireCategory;
  scope_spans: [number, number][];
  children: WireChild[];
}

export type WireChild =
  | WireTreeNode
  | { kind: "token"; token: string }
  | { kind: "fwd_ref"; position: number; features: Record<string, string> }
  | { kind: "bwd_ref"; features: Record<string, string>; antecedent_position: number }
  | { kind: "scope_opener"; position: number };

export interface GrammarInfo {
  id: string;
  rule_count: number;
}

export interface CreateResponse {
  session_id: string;
  options: WireOption[];
  complete: boolean;
}

export interface StateResponse {
  options: WireOption[];
  antecedents: WireAntecedent[];
  complete: boolean;
}

export interface PushResponse extends StateResponse {
  accepted: boolean;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ServiceError(response.status, detail);
  }
  return (await response.json()) as T;
}

/** Thin fetch wrapper; the editor holds no grammar logic of its own. */
export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async listGrammars(): Promise<GrammarInfo[]> {
    const body = await asJson<{ grammars: GrammarInfo[] }>(await fetch(this.url("/grammars")));
    return body.grammars;
  }

  async createSession(grammarId: string): Promise<CreateResponse> {
    return asJson(
      await fetch(this.url("/sessions"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ grammar_id: grammarId }),
      }),
    );
  }

  async pushToken(sessionId: string, token: string): Promise<PushResponse> {
    return asJson(
      await fetch(this.url(`/sessions/${sessionId}/tokens`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ token }),
      }),
    );
  }

  async popToken(sessionId: string): Promise<StateResponse> {
    return asJson(
      await fetch(this.url(`/sessions/${sessionId}/tokens/last`), { method: "DELETE" }),
    );
  }

  async getTree(sessionId: string): Promise<WireTreeNode[]> {
    const body = await asJson<{ trees: WireTreeNode[] }>(
      await fetch(this.url(`/sessions/${sessionId}/tree`)),
    );
    return body.trees;
  }
}

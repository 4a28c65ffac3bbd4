// Routed fetch mock. Curve requests can be left pending and resolved by hand
// so tests can interleave slider moves with responses; everything else
// answers synchronously from the route table.

import { vi } from "vitest";

export interface PendingCurve {
  url: URL;
  aborted: () => boolean;
  respond: (body: unknown) => void;
}

export interface RouteTable {
  /** status+body for GET /v1/profiles/{type}; keyed by type. */
  profiles?: Record<string, { status: number; body: unknown }>;
  /** status+body for PUT /v1/profiles/{type}. */
  putProfile?: { status: number; body: unknown };
  /** response for GET /v1/estimate. */
  estimate?: { status: number; body: unknown };
  /** when set, curve requests resolve immediately with this body. */
  instantCurve?: unknown;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function installFetchMock(routes: RouteTable) {
  const curveCalls: PendingCurve[] = [];
  const putBodies: unknown[] = [];

  const fetchMock = vi.fn((input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input));
    const signal = init?.signal ?? null;

    if (url.pathname === "/v1/curve") {
      return new Promise<Response>((resolve, reject) => {
        const entry: PendingCurve = {
          url,
          aborted: () => signal?.aborted ?? false,
          respond: (body) => resolve(jsonResponse(200, body)),
        };
        signal?.addEventListener("abort", () =>
          reject(new DOMException("aborted", "AbortError")),
        );
        curveCalls.push(entry);
        if (routes.instantCurve !== undefined) entry.respond(routes.instantCurve);
      });
    }

    if (url.pathname.startsWith("/v1/profiles/")) {
      const attrType = decodeURIComponent(url.pathname.split("/").pop() ?? "");
      if (init?.method === "PUT") {
        putBodies.push(JSON.parse(String(init.body)));
        const reply = routes.putProfile ?? { status: 200, body: JSON.parse(String(init.body)) };
        return Promise.resolve(jsonResponse(reply.status, reply.body));
      }
      const reply = routes.profiles?.[attrType] ?? {
        status: 404,
        body: { code: "unknown_profile", message: `no profile for ${attrType}` },
      };
      return Promise.resolve(jsonResponse(reply.status, reply.body));
    }

    if (url.pathname === "/v1/estimate") {
      const reply = routes.estimate ?? {
        status: 422,
        body: { code: "empty_distribution", message: "nothing to fit" },
      };
      return Promise.resolve(jsonResponse(reply.status, reply.body));
    }

    return Promise.resolve(
      jsonResponse(404, { code: "not_found", message: url.pathname }),
    );
  });

  vi.stubGlobal("fetch", fetchMock);
  return { fetchMock, curveCalls, putBodies };
}

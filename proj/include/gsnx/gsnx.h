#ifndef GSNX_GSNX_H
#define GSNX_GSNX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GSNX_BUILDING_LIBRARY)
#    define GSNX_API __declspec(dllexport)
#  else
#    define GSNX_API __declspec(dllimport)
#  endif
#else
#  define GSNX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the library's internal error codes. */
typedef enum gsnx_status {
    GSNX_OK = 0,
    GSNX_E_INVALID_ARGUMENT = 1,
    GSNX_E_SCAN = 2,
    GSNX_E_PREFS_PARSE = 3,
    GSNX_E_DB_OPEN = 4,
    GSNX_E_CACHE_PARSE = 5,
    GSNX_E_MALFORMED_TIMESTAMP = 6,
    GSNX_E_INGEST = 7,
    GSNX_E_FORGE = 8,
    GSNX_E_USAGE = 9,
    GSNX_E_NOT_APPLICABLE = 10,
    GSNX_E_IO = 11,
    GSNX_E_ONLINE_CHECK_FAILED = 12,
    GSNX_E_INTERNAL = 99
} gsnx_status;

typedef struct gsnx_session gsnx_session;
typedef struct gsnx_response gsnx_response;

/* Strings returned through char** are heap allocated; release with gsnx_string_free. */
GSNX_API void gsnx_string_free(char* s);

GSNX_API const char* gsnx_version(void);
GSNX_API const char* gsnx_status_name(gsnx_status status);
/* Message of the last failed call on this thread; "" when none. */
GSNX_API const char* gsnx_last_error(void);

/* evidence_root: an acquired data partition (containing data/data) or a data/data directory. */
GSNX_API gsnx_status gsnx_session_open(const char* evidence_root, gsnx_session** out);
GSNX_API void gsnx_session_close(gsnx_session* session);

/* Extended app registry (package_path<TAB>app_name per line). NULL restores the defaults. */
GSNX_API gsnx_status gsnx_session_set_registry(gsnx_session* session, const char* config_path);
/* ISO-8601 UTC; message times more than a day after it produce warnings. NULL clears. */
GSNX_API gsnx_status gsnx_session_set_acquisition_time(gsnx_session* session, const char* iso_time);

/* File catalog as JSON. Does not run extraction. */
GSNX_API gsnx_status gsnx_scan(gsnx_session* session, char** json_out);
/* Runs extraction once; later calls reuse the result. */
GSNX_API gsnx_status gsnx_extract(gsnx_session* session);
/* NDJSON transaction log to analyse alongside the evidence. */
GSNX_API gsnx_status gsnx_attach_http_log(gsnx_session* session, const char* path);
GSNX_API gsnx_status gsnx_set_identity_map(gsnx_session* session, const char* path);
/* Adds a contact section to subsequent reports. before_iso may be NULL. */
GSNX_API gsnx_status gsnx_set_contact(gsnx_session* session, const char* identity_a, const char* identity_b,
                                      const char* before_iso);

/* format: "json" or "text". report_time_iso may be NULL (latest evidence instant is used). */
GSNX_API gsnx_status gsnx_report(gsnx_session* session, const char* format, const char* report_time_iso, char** out);

/* JSON object, or "null" when nothing links the two identities. */
GSNX_API gsnx_status gsnx_contact_evidence(gsnx_session* session, const char* identity_a, const char* identity_b,
                                           const char* before_iso, char** json_out);

/* Transport for online token checks. The callback fills `response` via gsnx_response_set and
   returns 0; a non-zero return counts as a transport failure. */
typedef int (*gsnx_transport_fn)(void* user, const char* url, gsnx_response* response);
GSNX_API gsnx_status gsnx_response_set(gsnx_response* response, int http_status, const char* body, size_t body_len);
/* NULL restores the built-in HTTPS transport (used only when online checks are allowed). */
GSNX_API gsnx_status gsnx_set_transport(gsnx_session* session, gsnx_transport_fn fn, void* user);
/* Off by default. Reports and gsnx_verify_tokens transmit nothing unless this is non-zero. */
GSNX_API gsnx_status gsnx_set_online_token_check(gsnx_session* session, int allow);
GSNX_API gsnx_status gsnx_verify_tokens(gsnx_session* session, char** json_out);

/* Writes a synthetic corpus into outdir (must be absent or empty). manifest_out may be NULL. */
GSNX_API gsnx_status gsnx_forge(const char* spec_path, const char* outdir, char** manifest_out);
GSNX_API gsnx_status gsnx_forge_canonical_spec(char** json_out);

/* App name for a package directory name such as "com.tinder"; "Unknown" when unregistered. */
GSNX_API const char* gsnx_lookup_app(const char* package_dir_name);
/* unit_out: 0 seconds, 1 milliseconds. */
GSNX_API gsnx_status gsnx_normalize_epoch(int64_t raw, int64_t* epoch_ms_out, int* unit_out);
/* Graph "me" URL for a Facebook access token; builds the string only. */
GSNX_API gsnx_status gsnx_graph_request_url(const char* token, char** url_out);

#ifdef __cplusplus
}
#endif

#endif

"""Activity labels and object types of the after-sales service process."""

SCHEDULE = "schedule"
TECHNICIAN = "technician"

SCHEDULER_START = "SCHEDULER START"
SCHEDULER_END = "SCHEDULER END"
ACCEPT = "ACCEPT"
REJECT = "REJECT"
ENROUTE = "ENROUTE"
ONSITE = "ONSITE"
INPROCESS = "INPROCESS"
HOLD = "HOLD"
JOB_DONE = "JOB DONE"
HEAD_OFFICE = "HEAD OFFICE"
ARRIVE_OFFICE = "ARRIVE OFFICE"
JOB_CLOSED = "JOB CLOSED"
SURVEY_SENT = "SURVEY SENT"

ACTIVITIES = (
    SCHEDULER_START,
    ACCEPT,
    REJECT,
    ENROUTE,
    ONSITE,
    INPROCESS,
    HOLD,
    JOB_DONE,
    HEAD_OFFICE,
    ARRIVE_OFFICE,
    JOB_CLOSED,
    SURVEY_SENT,
    SCHEDULER_END,
)

# Which object types each activity references (Table-1 conventions).
OMAP_CONVENTION = {
    SCHEDULER_START: (SCHEDULE,),
    SCHEDULER_END: (SCHEDULE,),
    ACCEPT: (SCHEDULE, TECHNICIAN),
    REJECT: (SCHEDULE, TECHNICIAN),
    ENROUTE: (TECHNICIAN,),
    ONSITE: (TECHNICIAN,),
    INPROCESS: (SCHEDULE, TECHNICIAN),
    HOLD: (SCHEDULE, TECHNICIAN),
    JOB_DONE: (SCHEDULE, TECHNICIAN),
    HEAD_OFFICE: (TECHNICIAN,),
    ARRIVE_OFFICE: (TECHNICIAN,),
    JOB_CLOSED: (SCHEDULE, TECHNICIAN),
    SURVEY_SENT: (SCHEDULE, TECHNICIAN),
}
